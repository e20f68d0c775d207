use crate::corpus::{Pos, Sentence};
use crate::tagger::Lexicon;

use super::{hit, FeatureHit, FeatureKind};

const PRECEDING_EXCLUSIONS: [&str; 15] = [
    "have", "has", "had", "having", "be", "is", "are", "was", "were", "been", "'s", "'re", "'m",
    "get", "got",
];

/// Perfective `done`: "done" followed (adverbs aside) by a verb with past
/// morphology, and not preceded by an auxiliary that would make it a plain
/// participle ("have done", "is done", "got done").
pub fn detect_perfective_done(s: &Sentence, lexicon: &Lexicon) -> Vec<FeatureHit> {
    let tokens = &s.tokens;
    let mut hits = Vec::new();
    for (i, token) in tokens.iter().enumerate() {
        if token.normalized != "done" {
            continue;
        }
        if i > 0 && PRECEDING_EXCLUSIONS.contains(&tokens[i - 1].normalized.as_str()) {
            continue;
        }
        let Some(next) = tokens[i + 1..].iter().find(|t| t.pos != Pos::ADV) else {
            continue;
        };
        let past = next.pos == Pos::VERB
            && (next.normalized.ends_with("ed") || lexicon.is_past_participle(&next.normalized));
        if past {
            hits.push(hit(s, FeatureKind::PerfectiveDone, (i, i + 1)));
        }
    }
    hits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::tagged;

    fn detect(text: &str) -> Vec<FeatureHit> {
        detect_perfective_done(&tagged(text), &Lexicon::builtin())
    }

    #[test]
    fn fires_on_done_plus_participle() {
        let hits = detect("I done lost my wallet.");
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].subject.as_deref(), Some("i"));
    }

    #[test]
    fn silent_on_perfect_have() {
        assert!(detect("I have lost my wallet.").is_empty());
        assert!(detect("I have done that before.").is_empty());
    }

    #[test]
    fn silent_after_copula_or_get() {
        assert!(detect("I'm done working.").is_empty());
        assert!(detect("we was done waiting").is_empty());
        assert!(detect("she got done talking").is_empty());
    }

    #[test]
    fn skips_adverbs_before_the_verb() {
        assert_eq!(detect("He done already finished the food.").len(), 1);
    }

    #[test]
    fn fires_on_regular_ed_verbs() {
        let hits = detect("They done changed the locks.");
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].subject.as_deref(), Some("they"));
    }

    #[test]
    fn fires_without_a_subject_when_dropped() {
        let hits = detect("Done lost my mind out here.");
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].subject, None);
    }

    #[test]
    fn needs_a_following_verb() {
        assert!(detect("the work is done").is_empty());
        assert!(detect("done deal").is_empty());
    }
}
