//! Built-in parameter sets for the eight reference runs (two per case, one
//! on each side of the stability boundary), together with their standard
//! initial conditions.

use std::f64::consts::LN_10;

use crate::error::{Error, Result};
use crate::model::{Case, ParameterSet, Vec4};

/// Which side of the stability boundary a reference run sits on:
/// `A` has `delta > 1`, `B` has `delta < 1`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Variant {
    A,
    B,
}

impl Variant {
    pub fn parse(s: &str) -> Result<Variant> {
        match s {
            "a" | "A" => Ok(Variant::A),
            "b" | "B" => Ok(Variant::B),
            other => Err(Error::InvalidInput(format!(
                "unknown variant \"{other}\": expected \"a\" or \"b\""
            ))),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Variant::A => 'a',
            Variant::B => 'b',
        }
    }
}

/// One reference run: parameters plus the standard initial condition
/// `x = (1, d1, 1e-10, 10^{x4_exp10})`.
#[derive(Clone, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub case: Case,
    pub variant: Variant,
    pub params: ParameterSet,
    /// Decimal exponent of the initial `x4`: -600 for variant A, -900 for B.
    pub x4_exp10: i32,
}

impl Preset {
    /// Initial state in natural-log coordinates. `u4_override`, when given,
    /// replaces the preset's starting depth.
    pub fn initial_log_state(&self, u4_override: Option<f64>) -> Vec4 {
        let u4 = u4_override.unwrap_or(self.x4_exp10 as f64 * LN_10);
        [0.0, self.params.get("d1").ln(), -10.0 * LN_10, u4]
    }
}

fn build(name: &'static str, case: Case, variant: Variant, entries: &[(&str, f64)]) -> Preset {
    let params = ParameterSet::new(case, entries.iter().map(|(k, v)| (*k, *v)))
        .expect("built-in preset must validate");
    let x4_exp10 = match variant {
        Variant::A => -600,
        Variant::B => -900,
    };
    Preset {
        name,
        case,
        variant,
        params,
        x4_exp10,
    }
}

/// All eight presets in canonical order: 9a, 9b, 10a, 10b, 11a, 11b, 12a, 12b.
pub fn all() -> Vec<Preset> {
    let case1_common: &[(&str, f64)] = &[
        ("d1", 1.1),
        ("d3", 1.1),
        ("e12", 1.3),
        ("c13", 0.5),
        ("c14", 0.6),
        ("t24", 1.3),
        ("e34", 1.3),
        ("c31", 0.6),
        ("c32", 0.4),
        ("t42", 1.2),
    ];
    let case2_common: &[(&str, f64)] = &[
        ("d1", 1.1),
        ("t13", 0.3),
        ("c14", 0.5),
        ("t24", 0.9),
        ("c31", 0.4),
        ("c32", 0.5),
        ("e41", 0.5),
        ("t42", 0.9),
        ("c43", 0.8),
    ];
    let case3_common: &[(&str, f64)] = &[
        ("d1", 1.1),
        ("d2", 1.0),
        ("t13", 0.3),
        ("c14", 0.5),
        ("t24", 0.9),
        ("e34", 1.6),
        ("c31", 0.4),
        ("e41", 0.4),
        ("c42", 0.9),
        ("c43", 0.8),
    ];
    let case4_common: &[(&str, f64)] = &[
        ("d1", 1.3),
        ("d2", 1.1),
        ("d3", 1.1),
        ("e12", 0.9),
        ("c13", 0.3),
        ("c14", 0.5),
        ("e23", 0.7),
        ("t24", 0.9),
        ("e34", 1.6),
        ("c31", 0.4),
        ("c42", 0.9),
    ];

    fn join<'a>(common: &[(&'a str, f64)], extra: &[(&'a str, f64)]) -> Vec<(&'a str, f64)> {
        common.iter().chain(extra.iter()).copied().collect()
    }

    vec![
        build(
            "fig9a",
            Case::Case1,
            Variant::A,
            &join(case1_common, &[("e23", 0.8), ("e41", 0.8)]),
        ),
        build(
            "fig9b",
            Case::Case1,
            Variant::B,
            &join(case1_common, &[("e23", 0.9), ("e41", 0.9)]),
        ),
        build(
            "fig10a",
            Case::Case2,
            Variant::A,
            &join(case2_common, &[("e12", 1.2), ("e23", 0.7), ("e34", 1.6)]),
        ),
        build(
            "fig10b",
            Case::Case2,
            Variant::B,
            &join(case2_common, &[("e12", 1.3), ("e23", 0.8), ("e34", 1.8)]),
        ),
        build(
            "fig11a",
            Case::Case3,
            Variant::A,
            &join(case3_common, &[("e12", 1.2), ("e23", 0.7)]),
        ),
        build(
            "fig11b",
            Case::Case3,
            Variant::B,
            &join(case3_common, &[("e12", 1.3), ("e23", 0.9)]),
        ),
        build(
            "fig12a",
            Case::Case4,
            Variant::A,
            &join(case4_common, &[("e41", 0.2)]),
        ),
        build(
            "fig12b",
            Case::Case4,
            Variant::B,
            &join(case4_common, &[("e41", 0.3)]),
        ),
    ]
}

pub fn names() -> Vec<&'static str> {
    all().iter().map(|p| p.name).collect()
}

pub fn by_name(name: &str) -> Option<Preset> {
    all().into_iter().find(|p| p.name == name)
}

pub fn for_figure(case: Case, variant: Variant) -> Preset {
    all()
        .into_iter()
        .find(|p| p.case == case && p.variant == variant)
        .expect("every (case, variant) pair has a preset")
}
