use crate::corpus::{Pos, Sentence};

use super::{hit, FeatureHit, FeatureKind};

const FIRST_MODALS: [&str; 4] = ["might", "may", "must", "should"];
const SECOND_MODALS: [&str; 6] = ["can", "could", "would", "will", "should", "oughta"];

/// Stacked modals: two adjacent MODAL tokens, the first epistemic
/// (might/may/must/should), the second ability/volition
/// (can/could/would/will/should/oughta).
pub fn detect_multiple_modals(s: &Sentence) -> Vec<FeatureHit> {
    let tokens = &s.tokens;
    let mut hits = Vec::new();
    for i in 0..tokens.len().saturating_sub(1) {
        let (first, second) = (&tokens[i], &tokens[i + 1]);
        if first.pos == Pos::MODAL
            && second.pos == Pos::MODAL
            && FIRST_MODALS.contains(&first.normalized.as_str())
            && SECOND_MODALS.contains(&second.normalized.as_str())
        {
            hits.push(hit(s, FeatureKind::MultipleModals, (i, i + 2)));
        }
    }
    hits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::tagged;

    #[test]
    fn fires_on_might_can() {
        let hits = detect_multiple_modals(&tagged("We might can go up there next Saturday."));
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].subject.as_deref(), Some("we"));
        assert_eq!(hits[0].trigger_span, (1, 3));
    }

    #[test]
    fn silent_on_modal_plus_periphrasis() {
        assert!(
            detect_multiple_modals(&tagged("We might be able to go up there next Saturday."))
                .is_empty()
        );
    }

    #[test]
    fn adjacency_is_required() {
        assert!(detect_multiple_modals(&tagged("you might, can you?")).is_empty());
        assert!(detect_multiple_modals(&tagged("she might really could")).is_empty());
    }

    #[test]
    fn order_matters() {
        assert!(detect_multiple_modals(&tagged("we can might go")).is_empty());
        assert_eq!(detect_multiple_modals(&tagged("y'all should oughta see it")).len(), 1);
        assert_eq!(detect_multiple_modals(&tagged("he might could help")).len(), 1);
    }
}
