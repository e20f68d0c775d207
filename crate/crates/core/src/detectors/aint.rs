use crate::corpus::Sentence;

use super::{hit, FeatureHit, FeatureKind};

/// Negative auxiliary `ain't`: fires on every token normalized to
/// "ain't" or "aint".
pub fn detect_aint(s: &Sentence) -> Vec<FeatureHit> {
    s.tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| matches!(t.normalized.as_str(), "ain't" | "aint"))
        .map(|(i, _)| hit(s, FeatureKind::Aint, (i, i + 1)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::tagged;

    #[test]
    fn fires_on_aint() {
        let hits = detect_aint(&tagged("I ain't doing all that."));
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].subject.as_deref(), Some("i"));
    }

    #[test]
    fn silent_on_standard_negation() {
        assert!(detect_aint(&tagged("I am not doing all of that.")).is_empty());
    }

    #[test]
    fn fires_sentence_initially_without_subject() {
        let hits = detect_aint(&tagged("Ain't nobody told me."));
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].subject, None);
        assert_eq!(hits[0].trigger_span, (0, 1));
    }

    #[test]
    fn counts_every_occurrence() {
        let hits = detect_aint(&tagged("ain't ain't a word, and aint got no vowels"));
        assert_eq!(hits.len(), 3);
    }
}
