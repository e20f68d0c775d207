use crate::corpus::{Pos, Sentence};
use crate::tagger::is_subject_candidate;

use super::{hit, FeatureHit, FeatureKind};

const HAVE_FORMS: [&str; 3] = ["have", "has", "had"];
const DO_FORMS: [&str; 3] = ["do", "does", "don"];
const FUSED_DO_NEGATORS: [&str; 2] = ["dont", "don"];

/// Habitual/aspectual bare `be`. Fires on a token "be" where
/// (a) the nearest preceding non-adverb token is a subject candidate or the
///     negation of a form of "do" ("they don't be"),
/// (b) none of the two preceding tokens is "to", a modal, or a form of
///     have/has/had ("to be", "might be", "have, like, be..." are all out),
/// (c) "be" is not the first word of the sentence (imperatives).
pub fn detect_habitual_be(s: &Sentence) -> Vec<FeatureHit> {
    let tokens = &s.tokens;
    let first_word = tokens.iter().position(|t| t.is_word());
    let mut hits = Vec::new();
    for (i, token) in tokens.iter().enumerate() {
        if token.normalized != "be" || Some(i) == first_word {
            continue;
        }
        let excluded = tokens[i.saturating_sub(2)..i].iter().any(|t| {
            t.normalized == "to"
                || t.pos == Pos::MODAL
                || HAVE_FORMS.contains(&t.normalized.as_str())
        });
        if excluded {
            continue;
        }
        let Some(k) = (0..i).rev().find(|&k| tokens[k].pos != Pos::ADV) else {
            continue;
        };
        let anchor = &tokens[k];
        let negated_do = anchor.pos == Pos::NEG
            && (FUSED_DO_NEGATORS.contains(&anchor.normalized.as_str())
                || (k > 0 && DO_FORMS.contains(&tokens[k - 1].normalized.as_str())));
        if is_subject_candidate(anchor) || negated_do {
            hits.push(hit(s, FeatureKind::HabitualBe, (i, i + 1)));
        }
    }
    hits
}
