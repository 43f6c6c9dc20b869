//! The four heteroclinic-cycle models: subspace lattice, eigenvalue
//! parameters, and assembly into a common Lotka-Volterra coefficient form
//! `x_k' = x_k (r_k + (M x)_k)`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// State vector in the ambient space.
pub type Vec4 = [f64; 4];
/// Dense 4x4 real matrix, row major.
pub type Mat4 = [[f64; 4]; 4];

/// One of the four cycle cases, distinguished by the dimensions of the
/// connecting subspaces P1..P4: case 1 = (2,3,2,3), case 2 = (2,3,2,2),
/// case 3 = (2,3,3,2), case 4 = (2,3,3,3).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Case {
    Case1,
    Case2,
    Case3,
    Case4,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::Case1, Case::Case2, Case::Case3, Case::Case4];

    pub fn from_id(id: u8) -> Result<Case> {
        match id {
            1 => Ok(Case::Case1),
            2 => Ok(Case::Case2),
            3 => Ok(Case::Case3),
            4 => Ok(Case::Case4),
            other => Err(Error::UnknownCase(other)),
        }
    }

    pub fn id(self) -> u8 {
        match self {
            Case::Case1 => 1,
            Case::Case2 => 2,
            Case::Case3 => 3,
            Case::Case4 => 4,
        }
    }

    /// Parameter keys required by this case, in canonical order.
    pub fn required_keys(self) -> &'static [&'static str] {
        match self {
            Case::Case1 => &[
                "d1", "d3", "e12", "c13", "c14", "e23", "t24", "e34", "c31", "c32", "e41", "t42",
            ],
            Case::Case2 => &[
                "d1", "e12", "t13", "c14", "e23", "t24", "e34", "c31", "c32", "e41", "t42", "c43",
            ],
            Case::Case3 => &[
                "d1", "d2", "e12", "t13", "c14", "e23", "t24", "e34", "c31", "e41", "c42", "c43",
            ],
            Case::Case4 => &[
                "d1", "d2", "d3", "e12", "c13", "c14", "e23", "t24", "e34", "c31", "e41", "c42",
            ],
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case {}", self.id())
    }
}

/// A set of coordinate indices from {1,2,3,4}, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Support(u8);

impl Support {
    pub const fn of(coords: &[usize]) -> Support {
        let mut mask = 0u8;
        let mut k = 0;
        while k < coords.len() {
            assert!(coords[k] >= 1 && coords[k] <= 4);
            mask |= 1 << (coords[k] - 1);
            k += 1;
        }
        Support(mask)
    }

    pub fn contains(self, coord: usize) -> bool {
        (1..=4).contains(&coord) && self.0 & (1 << (coord - 1)) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersect(self, other: Support) -> Support {
        Support(self.0 & other.0)
    }

    pub fn minus(self, other: Support) -> Support {
        Support(self.0 & !other.0)
    }

    /// Member coordinates in ascending order (1-based).
    pub fn coords(self) -> Vec<usize> {
        (1..=4).filter(|&c| self.contains(c)).collect()
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs: Vec<String> = self.coords().iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", cs.join(","))
    }
}

/// Whether an equilibrium sits on a coordinate axis or in a coordinate plane.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Location {
    Axis,
    Plane,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Axis => write!(f, "axis"),
            Location::Plane => write!(f, "plane"),
        }
    }
}

/// The flow-invariant subspace lattice of one case: for each equilibrium
/// `xi_i` the supports of the connecting subspace `P_i` (smallest invariant
/// subspace containing the connection to `xi_{i+1}`) and of
/// `L_i = P_{i-1} ∩ P_i`, which carries `xi_i` itself.
#[derive(Clone, Copy, Debug)]
pub struct CaseSpec {
    case: Case,
    p_supports: [Support; 4],
    l_supports: [Support; 4],
}

impl CaseSpec {
    pub fn of(case: Case) -> CaseSpec {
        let p_supports = match case {
            Case::Case1 => [
                Support::of(&[1, 2]),
                Support::of(&[1, 2, 3]),
                Support::of(&[3, 4]),
                Support::of(&[1, 3, 4]),
            ],
            Case::Case2 => [
                Support::of(&[1, 2]),
                Support::of(&[1, 2, 3]),
                Support::of(&[3, 4]),
                Support::of(&[1, 4]),
            ],
            Case::Case3 => [
                Support::of(&[1, 2]),
                Support::of(&[1, 2, 3]),
                Support::of(&[2, 3, 4]),
                Support::of(&[1, 4]),
            ],
            Case::Case4 => [
                Support::of(&[1, 2]),
                Support::of(&[1, 2, 3]),
                Support::of(&[2, 3, 4]),
                Support::of(&[1, 3, 4]),
            ],
        };
        let mut l_supports = [Support::of(&[]); 4];
        for i in 1..=4 {
            let prev = p_supports[wrap(i as isize - 1) - 1];
            l_supports[i - 1] = prev.intersect(p_supports[i - 1]);
        }
        CaseSpec {
            case,
            p_supports,
            l_supports,
        }
    }

    pub fn case(&self) -> Case {
        self.case
    }

    /// Support of `P_i` (1-based equilibrium index).
    pub fn p_support(&self, i: usize) -> Support {
        self.p_supports[wrap(i as isize) - 1]
    }

    /// Support of `L_i`, equal to the support of the equilibrium `xi_i`.
    pub fn l_support(&self, i: usize) -> Support {
        self.l_supports[wrap(i as isize) - 1]
    }

    /// Support of the equilibrium `xi_i` (coordinates with nonzero value).
    pub fn equilibrium_support(&self, i: usize) -> Support {
        self.l_support(i)
    }

    pub fn location(&self, i: usize) -> Location {
        if self.equilibrium_support(i).len() == 1 {
            Location::Axis
        } else {
            Location::Plane
        }
    }

    /// The single expanding coordinate direction at `xi_i`: `P_i \ L_i`.
    pub fn expanding_direction(&self, i: usize) -> usize {
        let set = self.p_support(i).minus(self.l_support(i));
        debug_assert_eq!(set.len(), 1);
        set.coords()[0]
    }

    /// Contracting coordinate directions at `xi_i`: `P_{i-1} \ L_i`.
    pub fn contracting_directions(&self, i: usize) -> Vec<usize> {
        self.p_support(i - 1).minus(self.l_support(i)).coords()
    }

    /// Transverse coordinate directions at `xi_i`: everything outside
    /// `P_{i-1} ∪ P_i`.
    pub fn transverse_directions(&self, i: usize) -> Vec<usize> {
        let covered = Support(self.p_support(i - 1).0 | self.p_support(i).0);
        (1..=4).filter(|&c| !covered.contains(c)).collect()
    }
}

/// Wrap an equilibrium index onto 1..=4 (cyclic).
pub fn wrap(i: isize) -> usize {
    (i - 1).rem_euclid(4) as usize + 1
}

/// Build the subspace lattice of a case.
pub fn case_spec(case: Case) -> CaseSpec {
    CaseSpec::of(case)
}

/// The eigenvalue parameters of one case: `d1..d3` fix equilibrium positions,
/// and each `c_ij` / `e_ij` / `t_ij` is the magnitude of the contracting /
/// expanding / transverse eigenvalue at `xi_i` in the `j` direction.
/// All values are strictly positive; the signs are fixed by the roles.
#[derive(Clone, PartialEq, Debug)]
pub struct ParameterSet {
    case: Case,
    values: BTreeMap<String, f64>,
}

impl ParameterSet {
    /// Validate and build a parameter set: exactly the case's required keys,
    /// every value strictly positive and finite.
    pub fn new<K: Into<String>>(
        case: Case,
        entries: impl IntoIterator<Item = (K, f64)>,
    ) -> Result<ParameterSet> {
        let required = case.required_keys();
        let mut values = BTreeMap::new();
        for (k, v) in entries {
            let key: String = k.into();
            if !required.contains(&key.as_str()) {
                return Err(Error::UnknownParameter {
                    case: case.id(),
                    key,
                });
            }
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::NonPositiveParameter { key, value: v });
            }
            values.insert(key, v);
        }
        let missing: Vec<String> = required
            .iter()
            .filter(|k| !values.contains_key(**k))
            .map(|k| k.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingParameters {
                case: case.id(),
                keys: missing,
            });
        }
        Ok(ParameterSet { case, values })
    }

    /// Parse the flat key-value document `{"case": n, "d1": .., ...}`.
    pub fn from_json_value(doc: &serde_json::Value) -> Result<ParameterSet> {
        let obj = doc.as_object().ok_or_else(|| {
            Error::InvalidInput("parameter document must be a JSON object".into())
        })?;
        let case_id = obj
            .get("case")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::InvalidInput("parameter document needs a \"case\" key".into()))?;
        let case = Case::from_id(case_id as u8)?;
        let mut entries = Vec::new();
        for (k, v) in obj {
            if k == "case" {
                continue;
            }
            let value = v.as_f64().ok_or_else(|| {
                Error::InvalidInput(format!("parameter \"{k}\" must be a number"))
            })?;
            entries.push((k.clone(), value));
        }
        ParameterSet::new(case, entries)
    }

    pub fn from_json_str(s: &str) -> Result<ParameterSet> {
        let doc: serde_json::Value = serde_json::from_str(s)?;
        ParameterSet::from_json_value(&doc)
    }

    /// Flat key-value document with the case id under `"case"`.
    pub fn to_json_value(&self) -> serde_json::Value {
        let mut obj = serde_json::Map::new();
        obj.insert("case".into(), serde_json::json!(self.case.id()));
        for (k, v) in &self.values {
            obj.insert(k.clone(), serde_json::json!(v));
        }
        serde_json::Value::Object(obj)
    }

    pub fn case(&self) -> Case {
        self.case
    }

    pub fn spec(&self) -> CaseSpec {
        CaseSpec::of(self.case)
    }

    pub fn value(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }

    /// Value of a required key. Panics if the key does not belong to the
    /// case; construction guarantees all required keys are present.
    pub fn get(&self, key: &str) -> f64 {
        *self
            .values
            .get(key)
            .unwrap_or_else(|| panic!("parameter \"{key}\" not present in {}", self.case))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Copy with one key replaced; the key must belong to the case.
    pub fn with_value(&self, key: &str, value: f64) -> Result<ParameterSet> {
        if !self.case.required_keys().contains(&key) {
            return Err(Error::UnknownParameter {
                case: self.case.id(),
                key: key.into(),
            });
        }
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::NonPositiveParameter {
                key: key.into(),
                value,
            });
        }
        let mut values = self.values.clone();
        values.insert(key.into(), value);
        Ok(ParameterSet {
            case: self.case,
            values,
        })
    }
}

/// One equilibrium of the cycle, in closed form.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Equilibrium {
    /// Cycle position, 1-based.
    pub index: usize,
    pub coordinates: Vec4,
}

/// Growth-rate vector `r` and interaction matrix `M` of the system
/// `x_k' = x_k (r_k + (M x)_k)`, together with the parameters it was
/// assembled from.
#[derive(Clone, Debug)]
pub struct LVSystem {
    growth: Vec4,
    interactions: Mat4,
    params: ParameterSet,
}

impl LVSystem {
    pub fn growth(&self) -> &Vec4 {
        &self.growth
    }

    pub fn interactions(&self) -> &Mat4 {
        &self.interactions
    }

    pub fn params(&self) -> &ParameterSet {
        &self.params
    }

    /// Per-capita growth rates `r + M x`.
    pub fn per_capita(&self, x: &Vec4) -> Vec4 {
        let mut out = self.growth;
        for k in 0..4 {
            for l in 0..4 {
                out[k] += self.interactions[k][l] * x[l];
            }
        }
        out
    }

    /// The vector field `x_k (r_k + (M x)_k)`.
    pub fn rhs(&self, x: &Vec4) -> Vec4 {
        let g = self.per_capita(x);
        [x[0] * g[0], x[1] * g[1], x[2] * g[2], x[3] * g[3]]
    }

    #[cfg(test)]
    pub(crate) fn with_interactions(mut self, interactions: Mat4) -> LVSystem {
        self.interactions = interactions;
        self
    }

    #[cfg(test)]
    pub(crate) fn with_growth(mut self, growth: Vec4) -> LVSystem {
        self.growth = growth;
        self
    }
}

/// Assemble the case's vector field in LV normal form. All four systems
/// carry a common `-X` term with `X = x1+x2+x3+x4` in their brackets; it is
/// folded into `M` by shifting every entry of row `k` by the sign the
/// bracket carries.
pub fn assemble_system(params: &ParameterSet) -> LVSystem {
    let p = params;
    let d1 = p.get("d1");
    let d2 = p.value("d2").unwrap_or(f64::NAN); // cases 3, 4 only
    let d3 = p.value("d3").unwrap_or(f64::NAN); // cases 1, 4 only

    let (growth, interactions) = match params.case() {
        Case::Case1 => {
            let (e12, c13, c14) = (p.get("e12"), p.get("c13"), p.get("c14"));
            let (e23, t24) = (p.get("e23"), p.get("t24"));
            let (e34, c31, c32) = (p.get("e34"), p.get("c31"), p.get("c32"));
            let (e41, t42) = (p.get("e41"), p.get("t42"));
            (
                [1.0, -1.0, 1.0, -1.0],
                [
                    [-1.0, d1 - 1.0, -c31 - 1.0, d3 * (1.0 + c31) + e41 - 1.0],
                    [
                        e12 + 1.0,
                        1.0 - d1 * (1.0 + e12),
                        1.0 - c32,
                        d3 * (c32 - 1.0) - t42 + 1.0,
                    ],
                    [-c13 - 1.0, d1 * (1.0 + c13) + e23 - 1.0, -1.0, d3 - 1.0],
                    [
                        1.0 - c14,
                        d1 * (c14 - 1.0) - t24 + 1.0,
                        e34 + 1.0,
                        1.0 - d3 * (1.0 + e34),
                    ],
                ],
            )
        }
        Case::Case2 => {
            let (e12, t13, c14) = (p.get("e12"), p.get("t13"), p.get("c14"));
            let (e23, t24) = (p.get("e23"), p.get("t24"));
            let (e34, c31, c32) = (p.get("e34"), p.get("c31"), p.get("c32"));
            let (e41, t42, c43) = (p.get("e41"), p.get("t42"), p.get("c43"));
            (
                [1.0, -1.0, 1.0, 1.0],
                [
                    [-1.0, d1 - 1.0, -c31 - 1.0, e41 - 1.0],
                    [e12 + 1.0, 1.0 - d1 * (1.0 + e12), 1.0 - c32, 1.0 - t42],
                    [-t13 - 1.0, d1 * (1.0 + t13) + e23 - 1.0, -1.0, -c43 - 1.0],
                    [-c14 - 1.0, d1 * (1.0 + c14) - t24 - 1.0, e34 - 1.0, -1.0],
                ],
            )
        }
        Case::Case3 => {
            let (e12, t13, c14) = (p.get("e12"), p.get("t13"), p.get("c14"));
            let (e23, t24) = (p.get("e23"), p.get("t24"));
            let (e34, c31) = (p.get("e34"), p.get("c31"));
            let (e41, c42, c43) = (p.get("e41"), p.get("c42"), p.get("c43"));
            (
                [1.0, -1.0, 1.0, 1.0],
                [
                    [-1.0, d1 - 1.0, d2 * (1.0 - d1) - c31 - 1.0, e41 - 1.0],
                    [
                        e12 + 1.0,
                        1.0 - d1 * (1.0 + e12),
                        d2 * (d1 * (1.0 + e12) - 1.0) + 1.0,
                        1.0 - c42,
                    ],
                    [
                        -t13 - 1.0,
                        d1 * (1.0 + t13) + e23 - 1.0,
                        d2 * (1.0 - d1 * (1.0 + t13) - e23) - 1.0,
                        -c43 - 1.0,
                    ],
                    [
                        -c14 - 1.0,
                        d1 * (1.0 + c14) - t24 - 1.0,
                        d2 * (1.0 + t24) - d1 * d2 * (1.0 + c14) + e34 - 1.0,
                        -1.0,
                    ],
                ],
            )
        }
        Case::Case4 => {
            let (e12, c13, c14) = (p.get("e12"), p.get("c13"), p.get("c14"));
            let (e23, t24) = (p.get("e23"), p.get("t24"));
            let (e34, c31) = (p.get("e34"), p.get("c31"));
            let (e41, c42) = (p.get("e41"), p.get("c42"));
            (
                [1.0, -1.0, 1.0, 1.0],
                [
                    [
                        -1.0,
                        d1 - 1.0,
                        d2 * (1.0 - d1) - c31 - 1.0,
                        d3 * (1.0 + c31) + d2 * d3 * (d1 - 1.0) + e41 - 1.0,
                    ],
                    [
                        e12 + 1.0,
                        1.0 - d1 * (1.0 + e12),
                        d2 * (d1 * (1.0 + e12) - 1.0) + 1.0,
                        1.0 - (d1 * d2 * d3 * (1.0 + e12) + d3 * (1.0 - d2) + c42),
                    ],
                    [
                        -c13 - 1.0,
                        d1 * (1.0 + c13) + e23 - 1.0,
                        d2 * (1.0 - d1 * (1.0 + c13) - e23) - 1.0,
                        d3 * (d1 * d2 * (1.0 + c13) + d2 * (e23 - 1.0) + 1.0) - 1.0,
                    ],
                    [
                        -c14 - 1.0,
                        d1 * (1.0 + c14) - t24 - 1.0,
                        d2 * (1.0 + t24) - d1 * d2 * (1.0 + c14) + e34 - 1.0,
                        d3 * (d1 * d2 * (1.0 + c14) - d2 * (1.0 + t24) - e34 + 1.0) - 1.0,
                    ],
                ],
            )
        }
    };

    LVSystem {
        growth,
        interactions,
        params: params.clone(),
    }
}

/// The four equilibria of the case in cycle order, in closed form.
pub fn equilibria(params: &ParameterSet) -> [Equilibrium; 4] {
    let d1 = params.get("d1");
    let (x3, x4) = match params.case() {
        Case::Case1 => ([0.0, 0.0, 1.0, 0.0], [0.0, 0.0, params.get("d3"), 1.0]),
        Case::Case2 => ([0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]),
        Case::Case3 => ([0.0, params.get("d2"), 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]),
        Case::Case4 => (
            [0.0, params.get("d2"), 1.0, 0.0],
            [0.0, 0.0, params.get("d3"), 1.0],
        ),
    };
    [
        Equilibrium {
            index: 1,
            coordinates: [1.0, 0.0, 0.0, 0.0],
        },
        Equilibrium {
            index: 2,
            coordinates: [d1, 1.0, 0.0, 0.0],
        },
        Equilibrium {
            index: 3,
            coordinates: x3,
        },
        Equilibrium {
            index: 4,
            coordinates: x4,
        },
    ]
}
