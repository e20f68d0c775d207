use crate::corpus::{Pos, Sentence, Token};

use super::{clause_spans, hit, FeatureHit, FeatureKind, NEGATORS, VERBAL_NEGATORS};

const INVERSION_STARTERS: [&str; 7] = ["ain't", "aint", "cannot", "cant", "don", "dont", "wont"];

fn is_negator(token: &Token) -> bool {
    let word = token.normalized.as_str();
    if word == "no" {
        return token.pos == Pos::DET;
    }
    NEGATORS.contains(&word)
}

/// Negative concord: a single clause holding two or more negators, at least
/// one of them verbal ("I don't never have no problems"), or opening with a
/// negative-auxiliary inversion ("ain't nobody..."). Clauses are token spans
/// bounded by `,.!?` and coordinating conjunctions.
pub fn detect_negative_concord(s: &Sentence) -> Vec<FeatureHit> {
    let mut hits = Vec::new();
    for (start, end) in clause_spans(&s.tokens) {
        let clause = &s.tokens[start..end];
        let negators: Vec<usize> = clause
            .iter()
            .enumerate()
            .filter(|(_, t)| is_negator(t))
            .map(|(j, _)| start + j)
            .collect();
        if negators.len() < 2 {
            continue;
        }
        let verbal = negators
            .iter()
            .any(|&i| VERBAL_NEGATORS.contains(&s.tokens[i].normalized.as_str()));
        let inverted = INVERSION_STARTERS.contains(&clause[0].normalized.as_str())
            || clause.get(1).is_some_and(|t| t.normalized == "n't");
        if verbal || inverted {
            let span = (negators[0], negators.last().unwrap() + 1);
            hits.push(hit(s, FeatureKind::NegativeConcord, span));
        }
    }
    hits
}
