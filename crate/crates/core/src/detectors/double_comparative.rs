use crate::corpus::{Pos, Sentence};
use crate::tagger::Lexicon;

use super::{hit, FeatureHit, FeatureKind};

const DEGREE_WORDS: [&str; 4] = ["more", "most", "less", "least"];
const IRREGULAR_COMPARATIVES: [&str; 4] = ["better", "worse", "best", "worst"];

/// Double comparative/superlative: a degree word (more/most/less/least)
/// immediately followed by a word already inflected for degree, either
/// -er/-est tagged ADJ/ADV and not an -er noun, or an irregular form.
pub fn detect_double_comparative(s: &Sentence, lexicon: &Lexicon) -> Vec<FeatureHit> {
    let tokens = &s.tokens;
    let mut hits = Vec::new();
    for i in 0..tokens.len().saturating_sub(1) {
        if !DEGREE_WORDS.contains(&tokens[i].normalized.as_str()) {
            continue;
        }
        let next = &tokens[i + 1];
        let word = next.normalized.as_str();
        let graded = (word.ends_with("er") || word.ends_with("est"))
            && matches!(next.pos, Pos::ADJ | Pos::ADV)
            && !lexicon.is_comparative_exception(word);
        if graded || IRREGULAR_COMPARATIVES.contains(&word) {
            hits.push(hit(s, FeatureKind::DoubleComparative, (i, i + 2)));
        }
    }
    hits
}
