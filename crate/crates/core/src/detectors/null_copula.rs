use crate::corpus::{Pos, Sentence, Token};
use crate::tagger::is_subject_candidate;

use super::{hit, FeatureHit, FeatureKind};

/// Pronouns that can stand before a zero copula.
const SUBJECT_PRONOUNS: [&str; 9] = [
    "he", "she", "we", "they", "you", "it", "that", "this", "who",
];

/// Future-marking modals that read as predicates after a bare subject
/// ("she gonna win").
const PREDICATE_MODALS: [&str; 3] = ["gonna", "finna", "tryna"];

/// Prepositions that open a locative predicate ("they at the crib").
const LOCATIVE_PREPS: [&str; 20] = [
    "in", "on", "at", "by", "near", "behind", "inside", "outside", "around", "over", "under",
    "up", "down", "out", "outta", "off", "from", "across", "between", "upon",
];

/// Verbs ending in "in" that are not g-dropped progressives.
const NON_PROGRESSIVE_IN_VERBS: [&str; 2] = ["begin", "win"];

/// Determiners that can open a predicate nominal ("he the captain").
/// Quantifier determiners head adverbial NPs ("all day") instead.
const PREDICATE_DETERMINERS: [&str; 13] = [
    "a", "an", "the", "my", "your", "his", "her", "our", "their", "its", "ur", "da", "dem",
];

/// How far past the subject to look for a predicate opener.
const SCAN_WINDOW: usize = 3;

fn subject_trigger(token: &Token) -> bool {
    match token.pos {
        Pos::PRON => SUBJECT_PRONOUNS.contains(&token.normalized.as_str()),
        Pos::NOUN | Pos::PROPN => is_subject_candidate(token),
        _ => false,
    }
}

fn progressive_verb(token: &Token) -> bool {
    if token.pos != Pos::VERB {
        return false;
    }
    let word = token.normalized.as_str();
    word.ends_with("ing")
        || word.ends_with("in'")
        || (word.ends_with("in") && !NON_PROGRESSIVE_IN_VERBS.contains(&word))
}

enum Step {
    Opener,
    Blocked,
    Skip,
}

fn classify(tokens: &[Token], j: usize) -> Step {
    let token = &tokens[j];
    if !token.is_word() {
        return Step::Blocked;
    }
    match token.pos {
        Pos::VERB => {
            if progressive_verb(token) {
                Step::Opener
            } else {
                Step::Blocked
            }
        }
        Pos::MODAL => {
            if PREDICATE_MODALS.contains(&token.normalized.as_str()) {
                Step::Opener
            } else {
                Step::Blocked
            }
        }
        Pos::AUX | Pos::NEG => Step::Blocked,
        // an inner subject gets its own scan; bailing keeps the subject honest
        Pos::PRON | Pos::NOUN | Pos::PROPN => Step::Blocked,
        Pos::ADJ => Step::Opener,
        Pos::DET => match tokens.get(j + 1) {
            Some(next)
                if matches!(next.pos, Pos::NOUN | Pos::PROPN)
                    && PREDICATE_DETERMINERS.contains(&token.normalized.as_str()) =>
            {
                Step::Opener
            }
            _ => Step::Skip,
        },
        Pos::PREP => {
            if LOCATIVE_PREPS.contains(&token.normalized.as_str()) {
                Step::Opener
            } else {
                Step::Blocked
            }
        }
        _ => Step::Skip,
    }
}

/// A candidate right after a verb, auxiliary, modal, preposition, or negator
/// sits in object (or degree) position, not subject position.
fn object_position(tokens: &[Token], i: usize) -> bool {
    i > 0
        && matches!(
            tokens[i - 1].pos,
            Pos::VERB | Pos::AUX | Pos::MODAL | Pos::PREP | Pos::NEG
        )
}

/// Zero copula: a subject (pronoun from a fixed set, or a noun) followed
/// within a short window by a predicate opener (adjective, progressive verb,
/// gonna/finna/tryna, determiner+noun, locative preposition) with no verb,
/// auxiliary, modal, negator, or non-locative preposition in between.
/// Questions, "you know", sentence-initial vocatives, and candidates in
/// object position are excluded.
pub fn detect_null_copula(s: &Sentence) -> Vec<FeatureHit> {
    if s.text.contains('?') {
        return Vec::new();
    }
    let tokens = &s.tokens;
    let first_word = tokens.iter().position(|t| t.is_word());
    let mut hits = Vec::new();
    for (i, token) in tokens.iter().enumerate() {
        if !subject_trigger(token) || object_position(tokens, i) {
            continue;
        }
        let vocative = Some(i) == first_word
            && token.pos != Pos::PRON
            && tokens.get(i + 1).is_some_and(|t| t.normalized == ",");
        if vocative {
            continue;
        }
        if token.normalized == "you"
            && tokens.get(i + 1).is_some_and(|t| t.normalized == "know")
        {
            continue;
        }
        for j in i + 1..tokens.len().min(i + 1 + SCAN_WINDOW) {
            match classify(tokens, j) {
                Step::Opener => {
                    hits.push(hit(s, FeatureKind::NullCopula, (i, j + 1)));
                    break;
                }
                Step::Blocked => break,
                Step::Skip => {}
            }
        }
    }
    hits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::tagged;

    #[test]
    fn fires_on_noun_predicate() {
        let hits = detect_null_copula(&tagged("Your mama a weight-lifter."));
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].subject.as_deref(), Some("mama"));
    }

    #[test]
    fn silent_when_copula_present() {
        assert!(detect_null_copula(&tagged("Your mama is a weight-lifter.")).is_empty());
        assert!(detect_null_copula(&tagged("He's trippin about it.")).is_empty());
        assert!(detect_null_copula(&tagged("They were at the crib.")).is_empty());
    }

    #[test]
    fn fires_on_adjective_predicate() {
        let hits = detect_null_copula(&tagged("She so happy about it."));
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].subject.as_deref(), Some("she"));
    }

    #[test]
    fn fires_on_progressive_predicate() {
        assert_eq!(detect_null_copula(&tagged("He trippin over nothing.")).len(), 1);
        assert_eq!(detect_null_copula(&tagged("They playing outside right now.")).len(), 1);
    }

    #[test]
    fn fires_on_future_marker() {
        let hits = detect_null_copula(&tagged("She gonna win it all."));
        assert_eq!(hits.len(), 1);
    }

    #[test]
    fn fires_on_locative() {
        let hits = detect_null_copula(&tagged("They at the mall."));
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].subject.as_deref(), Some("they"));
    }

    #[test]
    fn discourse_you_know_is_excluded() {
        assert!(detect_null_copula(&tagged("You know, we tried.")).is_empty());
    }

    #[test]
    fn questions_are_excluded() {
        assert!(detect_null_copula(&tagged("Who you with?")).is_empty());
    }

    #[test]
    fn sentence_initial_vocative_is_excluded() {
        let hits = detect_null_copula(&tagged("Girl, he funny."));
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].subject.as_deref(), Some("he"));
    }

    #[test]
    fn in_verbs_that_are_not_progressive_do_not_open() {
        assert!(detect_null_copula(&tagged("They begin shouting at noon.")).is_empty());
    }

    #[test]
    fn inner_subject_wins() {
        let hits = detect_null_copula(&tagged("Keisha says that man crazy."));
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].subject.as_deref(), Some("man"));
    }

    #[test]
    fn object_position_nouns_do_not_trigger() {
        assert!(detect_null_copula(&tagged("He gives mom her medicine.")).is_empty());
        assert!(detect_null_copula(&tagged("It is not that deep.")).is_empty());
    }

    #[test]
    fn quantifier_noun_phrases_do_not_open() {
        assert!(detect_null_copula(&tagged("My brother be playing that game all day.")).is_empty());
    }

    #[test]
    fn non_locative_preposition_blocks() {
        assert!(detect_null_copula(&tagged("The start of the race got delayed.")).is_empty());
    }
}
