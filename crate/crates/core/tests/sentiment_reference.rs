//! Compound scores frozen from an independent reference implementation of
//! the same scoring rules, run over the shipped lexicon. Any drift in
//! tokenization, negation windows, boosters, idioms, emphasis, or
//! normalization shows up here first.

use aave_toolkit::sentiment::{compound_score, SentimentLexicon};

const EPS: f64 = 1e-9;

const BATTERY: [(&str, f64); 42] = [
    ("", 0.000000000000),
    ("good", 0.440433570760),
    ("Good", 0.440433570760),
    ("GOOD", 0.440433570760),
    ("bad", -0.476657605575),
    ("not good", -0.341237651254),
    ("not bad", 0.372383408213),
    ("no good", -0.341237651254),
    ("There is no hope.", -0.308926241053),
    ("no cap", -0.295958174200),
    ("very good", 0.492725031740),
    ("very bad", -0.525630124928),
    ("VERY good day", 0.602799766197),
    ("BAD day", -0.590389154890),
    ("extremely good!", 0.540023148062),
    ("good!", 0.492554870219),
    ("good!!", 0.539869181768),
    ("good!!!", 0.582569121922),
    ("good!!!!!", 0.582569121922),
    ("Are you good??", 0.503997428432),
    ("Are you good????", 0.594036409572),
    ("never good", -0.341237651254),
    ("never so good", 0.577720739569),
    ("I ain't never been this happy.", 0.578947368421),
    ("The movie was kind of good.", 0.383244731764),
    ("It was sort of bad.", -0.525630124928),
    ("I was sad but the music was amazing!!", 0.733856038750),
    ("This camera is the shit.", 0.612372435696),
    ("It was the kiss of death.", -0.361157559257),
    ("At least the food was good.", 0.440433570760),
    ("The food was at least good.", 0.440433570760),
    ("It is without doubt good.", 0.613645821851),
    ("The food was least good.", -0.341237651254),
    ("This isn't good.", -0.341237651254),
    ("The team was strong and the crowd was happy.", 0.726945784018),
    ("That beat is fire!", 0.556186500359),
    ("This party is lit!", 0.556186500359),
    ("He salty about it for no reason.", -0.571885032070),
    ("She walked to the store.", 0.000000000000),
    ("won the game :)", 0.458831467741),
    ("lost the game :(", -0.709560194985),
    ("My dawg got me crying with laughter, I can't breathe!!", 0.173916602014),
];

#[test]
fn battery_matches_reference_scores() {
    let lexicon = SentimentLexicon::builtin();
    let mut failures = Vec::new();
    for (text, expected) in BATTERY {
        let got = compound_score(text, &lexicon);
        if (got - expected).abs() > EPS {
            failures.push(format!("{text:?}: expected {expected:+.12}, got {got:+.12}"));
        }
    }
    assert!(failures.is_empty(), "\n{}", failures.join("\n"));
}
