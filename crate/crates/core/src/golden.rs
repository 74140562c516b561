//! Published example matrices, transcribed entry by entry, and their
//! regeneration from the code `# ≐ 101`, `␣ ≐ 100`, `b ≐ 110`,
//! `q₁ ≐ 00001`, `q₉ ≐ 01001`.

use num_traits::One;

use crate::binaut::BinWord;
use crate::exact::{int, pow2, RatMatrix, Rational};
use crate::pcp::PrefixCode;
use crate::pcp2pfa::{eleven_state_matrix, twelve_state_matrix};
use crate::tm2mpcp::{efficient_code, rule_pairs, Head, Move, MpcpOptions, PairKind, Rule, TuringMachine};

fn block(den: i64, rows: &[&[i64]]) -> RatMatrix {
    RatMatrix::from_ints(rows).scale(&(Rational::one() / int(den)))
}

fn twelve(den: [i64; 3], a: &[&[i64]], b: &[&[i64]], c: &[&[i64]]) -> RatMatrix {
    let boxes = RatMatrix::block_diag(&[&block(den[0], a), &block(den[1], b), &block(den[2], c)]);
    let mut m = RatMatrix::zeros(12, 12);
    m.put_block(0, 0, &boxes);
    let g = pow2(-22);
    m.set(10, 10, g.clone());
    m.set(10, 11, Rational::one() - g);
    m.set(11, 11, Rational::one());
    m
}

/// Copying pair `(␣,␣)` in the twelve-state layout.
pub fn copying_pair_display() -> RatMatrix {
    let sq: &[&[i64]] = &[&[16, 32, 16], &[12, 32, 20], &[9, 30, 25]];
    twelve(
        [64, 64, 64],
        &[
            &[16, 16, 16, 16],
            &[12, 20, 12, 20],
            &[12, 12, 20, 20],
            &[9, 15, 15, 25],
        ],
        sq,
        sq,
    )
}

/// Erasing pair `(#␣,#)`, reversed to `(␣#,#)`, in the twelve-state layout.
pub fn erasing_pair_display() -> RatMatrix {
    twelve(
        [512, 4096, 64],
        &[
            &[81, 135, 111, 185],
            &[54, 162, 74, 222],
            &[78, 130, 114, 190],
            &[52, 156, 76, 228],
        ],
        &[&[729, 1998, 1369], &[702, 1988, 1406], &[676, 1976, 1444]],
        &[&[9, 30, 25], &[6, 28, 30], &[4, 24, 36]],
    )
}

/// Left-rule pair `(b q₉ ␣, q₁ b ␣)` from the rule `(q₉,␣,␣,L,q₁)`.
pub fn left_rule_display() -> RatMatrix {
    let d = 1 << 22;
    twelve(
        [d, d, d],
        &[
            &[786126, 1151282, 915762, 1341134],
            &[785180, 1152228, 914660, 1342236],
            &[785295, 1150065, 916593, 1342351],
            &[784350, 1151010, 915490, 1343454],
        ],
        &[
            &[894916, 2084984, 1214404],
            &[893970, 2084828, 1215506],
            &[893025, 2084670, 1216609],
        ],
        &[
            &[690561, 2022654, 1481089],
            &[689730, 2022268, 1482306],
            &[688900, 2021880, 1483524],
        ],
    )
}

/// Unreversed erasing pair `(#␣,#)` in the eleven-state layout, `γ = 2^{−44}`.
pub fn eleven_state_display() -> RatMatrix {
    let rows: [[i64; 9]; 9] = [
        [3600, 12000, 10000, 15840, 52800, 44000, 17424, 58080, 48400],
        [2400, 11200, 12000, 10560, 49280, 52800, 11616, 54208, 58080],
        [1600, 9600, 14400, 7040, 42240, 63360, 7744, 46464, 69696],
        [3420, 11400, 9500, 15624, 52080, 43400, 17820, 59400, 49500],
        [2280, 10640, 11400, 10416, 48608, 52080, 11880, 55440, 59400],
        [1520, 9120, 13680, 6944, 41664, 62496, 7920, 47520, 71280],
        [3249, 10830, 9025, 15390, 51300, 42750, 18225, 60750, 50625],
        [2166, 10108, 10830, 10260, 47880, 51300, 12150, 56700, 60750],
        [1444, 8664, 12996, 6840, 41040, 61560, 8100, 48600, 72900],
    ];
    let refs: Vec<&[i64]> = rows.iter().map(|r| &r[..]).collect();
    let mut m = RatMatrix::zeros(11, 11);
    m.put_block(0, 0, &block(1 << 18, &refs));
    let g = pow2(-44);
    m.set(9, 9, g.clone());
    m.set(9, 10, Rational::one() - g);
    m.set(10, 10, Rational::one());
    m
}

/// Fifteen states `q0…q14`, tape alphabet `{␣, b}`, one rule `(q9,␣,␣,L,q1)`.
pub fn display_machine() -> TuringMachine {
    TuringMachine {
        states: (0..15).map(|i| format!("q{i}")).collect(),
        alphabet: vec!["␣".into(), "b".into()],
        blank: "␣".into(),
        start: "q0".into(),
        rules: vec![Rule::step("q9", "␣", "␣", Move::L, "q1")],
        head: Head::Left,
    }
}

pub fn display_code() -> PrefixCode {
    efficient_code(&display_machine(), true).expect("fits")
}

fn coded_reversed(code: &PrefixCode, word: &[String]) -> BinWord {
    let rev: Vec<String> = word.iter().rev().cloned().collect();
    code.encode(&rev).expect("coded")
}

fn twelve_from(code: &PrefixCode, v: &[String], w: &[String]) -> RatMatrix {
    twelve_state_matrix(&coded_reversed(code, v), &coded_reversed(code, w), &pow2(-22))
}

fn syms(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// Regenerates the copying-pair matrix from the compiled machine.
pub fn regenerate_copying_pair() -> RatMatrix {
    let tm = display_machine();
    let pairs = rule_pairs(&tm, MpcpOptions::default());
    let ((v, w), _) = pairs
        .iter()
        .find(|(_, k)| *k == PairKind::Copy("␣".into()))
        .expect("copying pair");
    twelve_from(&display_code(), v, w)
}

pub fn regenerate_erasing_pair() -> RatMatrix {
    twelve_from(&display_code(), &syms(&["#", "␣"]), &syms(&["#"]))
}

/// The left-rule pair for `t = b`, taken from the compiled machine.
pub fn regenerate_left_rule() -> RatMatrix {
    let tm = display_machine();
    let pairs = rule_pairs(&tm, MpcpOptions::default());
    let ((v, w), _) = pairs
        .iter()
        .find(|(_, k)| {
            *k == PairKind::Left {
                rule: 0,
                t: "b".into(),
            }
        })
        .expect("left pair");
    assert_eq!(v, &syms(&["b", "q9", "␣"]));
    assert_eq!(w, &syms(&["q1", "b", "␣"]));
    twelve_from(&display_code(), v, w)
}

pub fn regenerate_eleven_state() -> RatMatrix {
    let code = display_code();
    let v = code.encode(&syms(&["#", "␣"])).expect("coded");
    let w = code.encode(&syms(&["#"])).expect("coded");
    eleven_state_matrix(&v, &w, &pow2(-44))
}

/// Each published matrix next to its regeneration.
pub fn printed_matrix_checks() -> Vec<(&'static str, RatMatrix, RatMatrix)> {
    vec![
        (
            "copying pair (␣,␣), 12 states",
            copying_pair_display(),
            regenerate_copying_pair(),
        ),
        (
            "erasing pair (#␣,#), 12 states",
            erasing_pair_display(),
            regenerate_erasing_pair(),
        ),
        (
            "left rule (q9,␣,␣,L,q1), 12 states",
            left_rule_display(),
            regenerate_left_rule(),
        ),
        (
            "erasing pair (#␣,#), 11 states",
            eleven_state_display(),
            regenerate_eleven_state(),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn displays_are_stochastic() {
        for (name, shown, _) in printed_matrix_checks() {
            assert!(shown.is_row_stochastic(), "{name}");
        }
    }

    #[test]
    fn regenerated_bit_exact() {
        for (name, shown, made) in printed_matrix_checks() {
            assert_eq!(shown, made, "{name}");
        }
    }

    #[test]
    fn eleven_state_block_is_kronecker_of_unreversed_squares() {
        use crate::binaut::b_matrix;
        use crate::pcp2pfa::merged3;
        let v: BinWord = "101100".parse().unwrap();
        let w: BinWord = "101".parse().unwrap();
        let k = merged3(&b_matrix(&v)).kron(&merged3(&b_matrix(&w)));
        assert_eq!(eleven_state_display().block(0, 0, 9, 9), k);
    }
}
