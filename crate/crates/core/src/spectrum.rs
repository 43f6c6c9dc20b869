//! Jacobians and eigenvalue classification at the cycle equilibria.
//!
//! Invariance of the coordinate hyperplanes makes the Jacobian at an
//! equilibrium block triangular: rows of coordinates outside the support are
//! purely diagonal, so their eigenvalues are the diagonal entries, and the
//! on-support block is at most 2x2 and is handled by the quadratic formula.
//! No general eigensolver is needed.

use crate::error::{Error, Result};
use crate::model::{
    assemble_system, equilibria, CaseSpec, LVSystem, Location, Mat4, ParameterSet, Vec4,
};

/// Classification of an eigenvalue at `xi_i` by where its eigendirection
/// lies: in `L_i` (radial), `P_{i-1} \ L_i` (contracting), `P_i \ L_i`
/// (expanding), or elsewhere (transverse).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Role {
    Radial,
    Contracting,
    Expanding,
    Transverse,
}

impl Role {
    pub fn label(self) -> &'static str {
        match self {
            Role::Radial => "radial",
            Role::Contracting => "contracting",
            Role::Expanding => "expanding",
            Role::Transverse => "transverse",
        }
    }

    /// Key prefix of the parameter naming this eigenvalue, for off-support
    /// directions.
    pub fn key_prefix(self) -> Option<char> {
        match self {
            Role::Expanding => Some('e'),
            Role::Contracting => Some('c'),
            Role::Transverse => Some('t'),
            Role::Radial => None,
        }
    }
}

/// A single eigenvalue; members of a complex-conjugate pair are stored as
/// two entries with opposite imaginary parts.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum EigenValue {
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl EigenValue {
    pub fn real_part(self) -> f64 {
        match self {
            EigenValue::Real(v) => v,
            EigenValue::Complex { re, .. } => re,
        }
    }

    fn to_json(self) -> serde_json::Value {
        match self {
            EigenValue::Real(v) => serde_json::json!(v),
            EigenValue::Complex { re, im } => serde_json::json!({ "re": re, "im": im }),
        }
    }
}

/// Eigendirection: a coordinate axis (exact by hyperplane invariance), or
/// inside the radial subspace `L_i` for on-support blocks.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EigenDirection {
    Coordinate(usize),
    RadialBlock,
}

impl EigenDirection {
    fn to_json(self) -> serde_json::Value {
        match self {
            EigenDirection::Coordinate(c) => serde_json::json!(c),
            EigenDirection::RadialBlock => serde_json::json!("radial-block"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct EigenEntry {
    pub direction: EigenDirection,
    pub role: Role,
    pub value: EigenValue,
}

/// Classified spectrum at one equilibrium.
#[derive(Clone, Debug)]
pub struct EquilibriumSpectrum {
    pub index: usize,
    pub location: Location,
    pub entries: Vec<EigenEntry>,
}

impl EquilibriumSpectrum {
    pub fn role_count(&self, role: Role) -> usize {
        self.entries.iter().filter(|e| e.role == role).count()
    }

    pub fn entry_for_coordinate(&self, coord: usize) -> Option<&EigenEntry> {
        self.entries
            .iter()
            .find(|e| e.direction == EigenDirection::Coordinate(coord))
    }

    /// The single expanding eigenvalue.
    pub fn expanding_value(&self) -> f64 {
        self.entries
            .iter()
            .find(|e| e.role == Role::Expanding)
            .map(|e| e.value.real_part())
            .expect("every equilibrium carries one expanding eigenvalue")
    }
}

/// Classified spectra at all four equilibria of a case.
#[derive(Clone, Debug)]
pub struct EigenReport {
    pub case: crate::model::Case,
    pub equilibria: [EquilibriumSpectrum; 4],
}

impl EigenReport {
    pub fn spectrum(&self, i: usize) -> &EquilibriumSpectrum {
        &self.equilibria[i - 1]
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let eqs: Vec<serde_json::Value> = self
            .equilibria
            .iter()
            .map(|eq| {
                let entries: Vec<serde_json::Value> = eq
                    .entries
                    .iter()
                    .map(|e| {
                        serde_json::json!({
                            "direction": e.direction.to_json(),
                            "role": e.role.label(),
                            "value": e.value.to_json(),
                        })
                    })
                    .collect();
                serde_json::json!({
                    "index": eq.index,
                    "location": eq.location.to_string(),
                    "entries": entries,
                })
            })
            .collect();
        serde_json::json!({ "case": self.case.id(), "equilibria": eqs })
    }
}

/// The on-support matrix of the linearisation at `xi_i`: 1x1 on axes,
/// 2x2 in planes.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum BlockMatrix {
    Scalar(f64),
    TwoByTwo([[f64; 2]; 2]),
}

impl BlockMatrix {
    pub fn trace(self) -> f64 {
        match self {
            BlockMatrix::Scalar(v) => v,
            BlockMatrix::TwoByTwo(m) => m[0][0] + m[1][1],
        }
    }

    pub fn determinant(self) -> f64 {
        match self {
            BlockMatrix::Scalar(v) => v,
            BlockMatrix::TwoByTwo(m) => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        }
    }
}

/// Eigenvalues of a radial block.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum BlockEigenvalues {
    Single(f64),
    RealPair(f64, f64),
    /// Conjugate pair `re ± i im` with `im > 0`.
    ComplexPair {
        re: f64,
        im: f64,
    },
}

impl BlockEigenvalues {
    pub fn as_entries(self) -> Vec<EigenValue> {
        match self {
            BlockEigenvalues::Single(v) => vec![EigenValue::Real(v)],
            BlockEigenvalues::RealPair(a, b) => vec![EigenValue::Real(a), EigenValue::Real(b)],
            BlockEigenvalues::ComplexPair { re, im } => vec![
                EigenValue::Complex { re, im },
                EigenValue::Complex { re, im: -im },
            ],
        }
    }
}

/// Radial linearisation at one equilibrium, with its stability verdict.
/// Stability uses real parts only; for 2x2 blocks that is trace < 0 and
/// determinant > 0.
#[derive(Clone, Copy, Debug)]
pub struct RadialBlock {
    pub equilibrium: usize,
    pub matrix: BlockMatrix,
    pub eigenvalues: BlockEigenvalues,
    pub stable: bool,
}

impl RadialBlock {
    pub fn to_json_value(&self) -> serde_json::Value {
        let matrix = match self.matrix {
            BlockMatrix::Scalar(v) => serde_json::json!([[v]]),
            BlockMatrix::TwoByTwo(m) => serde_json::json!(m),
        };
        let eigenvalues: Vec<serde_json::Value> = self
            .eigenvalues
            .as_entries()
            .into_iter()
            .map(EigenValue::to_json)
            .collect();
        serde_json::json!({
            "equilibrium": self.equilibrium,
            "matrix": matrix,
            "eigenvalues": eigenvalues,
            "stable": self.stable,
        })
    }
}

/// Analytic Jacobian of the LV field: `J_kl = x_k M_kl + δ_kl (r_k + (Mx)_k)`.
pub fn jacobian(system: &LVSystem, x: &Vec4) -> Mat4 {
    let per_capita = system.per_capita(x);
    let m = system.interactions();
    let mut j = [[0.0; 4]; 4];
    for k in 0..4 {
        for l in 0..4 {
            j[k][l] = x[k] * m[k][l];
        }
        j[k][k] += per_capita[k];
    }
    j
}

fn block_eigenvalues(matrix: BlockMatrix) -> BlockEigenvalues {
    match matrix {
        BlockMatrix::Scalar(v) => BlockEigenvalues::Single(v),
        BlockMatrix::TwoByTwo(_) => {
            let tr = matrix.trace();
            let det = matrix.determinant();
            let disc = tr * tr - 4.0 * det;
            if disc >= 0.0 {
                let s = disc.sqrt();
                BlockEigenvalues::RealPair((tr + s) / 2.0, (tr - s) / 2.0)
            } else {
                BlockEigenvalues::ComplexPair {
                    re: tr / 2.0,
                    im: (-disc).sqrt() / 2.0,
                }
            }
        }
    }
}

fn radial_block_of(system: &LVSystem, spec: &CaseSpec, i: usize) -> RadialBlock {
    let xi = equilibria(system.params())[i - 1].coordinates;
    let support = spec.equilibrium_support(i).coords();
    let m = system.interactions();
    let matrix = match support.as_slice() {
        [c] => BlockMatrix::Scalar(xi[c - 1] * m[c - 1][c - 1]),
        [c1, c2] => BlockMatrix::TwoByTwo([
            [
                xi[c1 - 1] * m[c1 - 1][c1 - 1],
                xi[c1 - 1] * m[c1 - 1][c2 - 1],
            ],
            [
                xi[c2 - 1] * m[c2 - 1][c1 - 1],
                xi[c2 - 1] * m[c2 - 1][c2 - 1],
            ],
        ]),
        other => unreachable!("equilibrium support of size {}", other.len()),
    };
    let eigenvalues = block_eigenvalues(matrix);
    let stable = match matrix {
        BlockMatrix::Scalar(v) => v < 0.0,
        BlockMatrix::TwoByTwo(_) => matrix.trace() < 0.0 && matrix.determinant() > 0.0,
    };
    RadialBlock {
        equilibrium: i,
        matrix,
        eigenvalues,
        stable,
    }
}

/// Extract the on-support radial block `diag(xi_sup) M_sup` at `xi_i`.
pub fn radial_block(params: &ParameterSet, i: usize) -> RadialBlock {
    let system = assemble_system(params);
    radial_block_of(&system, &params.spec(), i)
}

/// Radial blocks and stability verdicts at all four equilibria. Radial
/// instability is a result, not an error.
pub fn radial_stability(params: &ParameterSet) -> [RadialBlock; 4] {
    let system = assemble_system(params);
    let spec = params.spec();
    std::array::from_fn(|k| radial_block_of(&system, &spec, k + 1))
}

pub(crate) fn classify_system(system: &LVSystem, spec: &CaseSpec) -> Result<EigenReport> {
    let eqs = equilibria(system.params());
    let mut spectra = Vec::with_capacity(4);
    for i in 1..=4 {
        let xi = eqs[i - 1].coordinates;
        let j = jacobian(system, &xi);
        let support = spec.equilibrium_support(i);
        let mut entries = Vec::with_capacity(4);

        let block = radial_block_of(system, spec, i);
        match block.matrix {
            BlockMatrix::Scalar(_) => {
                let coord = support.coords()[0];
                entries.push(EigenEntry {
                    direction: EigenDirection::Coordinate(coord),
                    role: Role::Radial,
                    value: block.eigenvalues.as_entries()[0],
                });
            }
            BlockMatrix::TwoByTwo(_) => {
                for value in block.eigenvalues.as_entries() {
                    entries.push(EigenEntry {
                        direction: EigenDirection::RadialBlock,
                        role: Role::Radial,
                        value,
                    });
                }
            }
        }

        let expanding_dir = spec.expanding_direction(i);
        let contracting = spec.contracting_directions(i);
        let mut positive_off_support = 0usize;
        for coord in 1..=4 {
            if support.contains(coord) {
                continue;
            }
            let value = j[coord - 1][coord - 1];
            let role = if coord == expanding_dir {
                Role::Expanding
            } else if contracting.contains(&coord) {
                Role::Contracting
            } else {
                Role::Transverse
            };
            if value > 0.0 {
                positive_off_support += 1;
            }
            if role == Role::Expanding && value <= 0.0 {
                return Err(Error::Structural(format!(
                    "cycle assumption A1 violated: expanding eigenvalue {value} <= 0 at xi_{i}"
                )));
            }
            entries.push(EigenEntry {
                direction: EigenDirection::Coordinate(coord),
                role,
                value: EigenValue::Real(value),
            });
        }
        if positive_off_support > 1 {
            return Err(Error::Structural(format!(
                "cycle assumption A1 violated: {positive_off_support} positive off-support eigenvalues at xi_{i}"
            )));
        }

        spectra.push(EquilibriumSpectrum {
            index: i,
            location: spec.location(i),
            entries,
        });
    }
    let equilibria: [EquilibriumSpectrum; 4] =
        spectra.try_into().expect("one spectrum per equilibrium");
    Ok(EigenReport {
        case: spec.case(),
        equilibria,
    })
}

/// Classify every eigenvalue at every equilibrium. Off-support eigenvalues
/// are read off the Jacobian diagonal (coordinate directions are exact
/// eigendirections); on-support eigenvalues come from the radial block.
pub fn classify(params: &ParameterSet) -> Result<EigenReport> {
    classify_system(&assemble_system(params), &params.spec())
}

/// True when the report exhibits the signature of unequal connecting
/// dimensions: some equilibrium with no contracting eigenvalue and some
/// equilibrium with at least two.
pub fn check_theorem1(report: &EigenReport) -> bool {
    let counts: Vec<usize> = report
        .equilibria
        .iter()
        .map(|eq| eq.role_count(Role::Contracting))
        .collect();
    counts.contains(&0) && counts.iter().any(|&c| c >= 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{case_spec, Case};
    use crate::presets;
    use crate::testutil::{random_params, random_state, rng};

    fn fig_params(name: &str) -> ParameterSet {
        presets::by_name(name).unwrap().params.clone()
    }

    #[test]
    fn jacobian_at_origin_is_diag_of_growth_rates() {
        let system = assemble_system(&fig_params("fig9a"));
        let j = jacobian(&system, &[0.0, 0.0, 0.0, 0.0]);
        for k in 0..4 {
            for l in 0..4 {
                let expect = if k == l { system.growth()[k] } else { 0.0 };
                assert_eq!(j[k][l], expect);
            }
        }
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let step = 1e-6;
        let mut r = rng(0x20);
        for case in Case::ALL {
            let p = random_params(case, &mut r);
            let system = assemble_system(&p);
            for _ in 0..100 {
                let x = random_state(&mut r);
                let j = jacobian(&system, &x);
                for l in 0..4 {
                    let mut xp = x;
                    let mut xm = x;
                    xp[l] += step;
                    xm[l] -= step;
                    let fp = system.rhs(&xp);
                    let fm = system.rhs(&xm);
                    for k in 0..4 {
                        let fd = (fp[k] - fm[k]) / (2.0 * step);
                        let scale = j[k][l].abs().max(1.0);
                        assert!(
                            (j[k][l] - fd).abs() <= 1e-6 * scale,
                            "{case} J[{k}][{l}] = {} vs fd {fd}",
                            j[k][l]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn fig9_diagonal_at_first_equilibrium() {
        let system = assemble_system(&fig_params("fig9a"));
        let j = jacobian(&system, &[1.0, 0.0, 0.0, 0.0]);
        assert!((j[1][1] - 1.3).abs() < 1e-12);
        assert!((j[2][2] + 0.5).abs() < 1e-12);
        assert!((j[3][3] + 0.6).abs() < 1e-12);
    }

    #[test]
    fn case2_first_equilibrium_roles_and_values() {
        let p = fig_params("fig10a");
        let report = classify(&p).unwrap();
        let eq = report.spectrum(1);
        let expect = [
            (1, Role::Radial, -1.0),
            (2, Role::Expanding, p.get("e12")),
            (3, Role::Transverse, -p.get("t13")),
            (4, Role::Contracting, -p.get("c14")),
        ];
        for (coord, role, value) in expect {
            let entry = eq.entry_for_coordinate(coord).unwrap();
            assert_eq!(entry.role, role, "coord {coord}");
            assert!((entry.value.real_part() - value).abs() < 1e-12);
        }
    }

    #[test]
    fn plane_reached_from_axis_has_no_contracting_eigenvalue() {
        let report = classify(&fig_params("fig9a")).unwrap();
        let eq2 = report.spectrum(2);
        assert_eq!(eq2.role_count(Role::Contracting), 0);
        assert_eq!(eq2.role_count(Role::Radial), 2);
        assert_eq!(eq2.entry_for_coordinate(3).unwrap().role, Role::Expanding);
        assert_eq!(eq2.entry_for_coordinate(4).unwrap().role, Role::Transverse);
    }

    #[test]
    fn axis_reached_from_plane_has_two_contracting_eigenvalues() {
        let report = classify(&fig_params("fig9a")).unwrap();
        let eq3 = report.spectrum(3);
        assert_eq!(eq3.role_count(Role::Contracting), 2);
        for coord in [1, 2] {
            assert_eq!(
                eq3.entry_for_coordinate(coord).unwrap().role,
                Role::Contracting
            );
        }
    }

    #[test]
    fn fig9_radial_block_at_second_equilibrium() {
        let block = radial_block(&fig_params("fig9a"), 2);
        let BlockMatrix::TwoByTwo(m) = block.matrix else {
            panic!("expected a 2x2 block");
        };
        let want = [[-1.1, 0.11], [2.3, -1.53]];
        for r in 0..2 {
            for c in 0..2 {
                assert!(
                    (m[r][c] - want[r][c]).abs() < 1e-12,
                    "entry ({r},{c}): {} vs {}",
                    m[r][c],
                    want[r][c]
                );
            }
        }
        assert!(block.stable);
    }

    #[test]
    fn on_axis_radial_blocks_are_minus_one() {
        for (name, on_axis) in [
            ("fig9a", vec![1, 3]),
            ("fig10a", vec![1, 3, 4]),
            ("fig11a", vec![1, 4]),
            ("fig12a", vec![1]),
        ] {
            let p = fig_params(name);
            for i in on_axis {
                let block = radial_block(&p, i);
                assert_eq!(block.matrix, BlockMatrix::Scalar(-1.0), "{name} xi_{i}");
                assert!(block.stable);
            }
        }
    }

    #[test]
    fn case4_fourth_equilibrium_block_matches_closed_form() {
        let mut r = rng(0x21);
        for _ in 0..20 {
            let p = random_params(Case::Case4, &mut r);
            let (d1, d2, d3) = (p.get("d1"), p.get("d2"), p.get("d3"));
            let (c13, c14, t24) = (p.get("c13"), p.get("c14"), p.get("t24"));
            let (e23, e34) = (p.get("e23"), p.get("e34"));
            let want = [
                [
                    -d3 * (d1 * d2 * (1.0 + c13) + d2 * (e23 - 1.0) + 1.0),
                    d3 * (d1 * d2 * d3 * (1.0 + c13) + d2 * d3 * (e23 - 1.0) + d3 - 1.0),
                ],
                [
                    d2 * (1.0 + t24) - d1 * d2 * (1.0 + c14) + e34 - 1.0,
                    d1 * d2 * d3 * (1.0 + c14) - d2 * d3 * (1.0 + t24) + d3 * (1.0 - e34) - 1.0,
                ],
            ];
            let block = radial_block(&p, 4);
            let BlockMatrix::TwoByTwo(m) = block.matrix else {
                panic!("expected a 2x2 block");
            };
            for i in 0..2 {
                for j in 0..2 {
                    let scale = want[i][j].abs().max(1.0);
                    assert!(
                        (m[i][j] - want[i][j]).abs() <= 1e-12 * scale,
                        "entry ({i},{j}): {} vs {}",
                        m[i][j],
                        want[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn radial_stability_threshold_in_d1() {
        // Stable iff d1 > 1/(2 + e12); the block determinant is d1 * e12 > 0,
        // so the verdict rides on the trace alone.
        let p = fig_params("fig9a");
        assert!(radial_block(&p, 2).stable);

        let unstable = p.with_value("d1", 0.2).unwrap();
        let block = radial_block(&unstable, 2);
        assert!(!block.stable);
        assert!(block.matrix.trace() > 0.0);

        // Just below the threshold 1 / (2 + 1.3).
        let boundary = p.with_value("d1", 1.0 / 3.3 - 1e-3).unwrap();
        assert!(!radial_block(&boundary, 2).stable);
    }

    #[test]
    fn all_reference_parameter_sets_are_radially_stable() {
        for preset in presets::all() {
            for block in radial_stability(&preset.params) {
                assert!(
                    block.stable,
                    "{} xi_{} should be radially stable",
                    preset.name, block.equilibrium
                );
            }
        }
    }

    #[test]
    fn complex_radial_pair_is_detected_and_judged_by_real_part() {
        let p = fig_params("fig9a")
            .with_value("d1", 0.5)
            .unwrap()
            .with_value("e12", 6.0)
            .unwrap();
        let block = radial_block(&p, 2);
        let BlockEigenvalues::ComplexPair { re, im } = block.eigenvalues else {
            panic!("expected a complex pair, got {:?}", block.eigenvalues);
        };
        assert!(im > 0.0);
        assert!(re < 0.0);
        assert!(block.stable);
    }

    #[test]
    fn block_eigenvalues_satisfy_trace_and_determinant() {
        let mut r = rng(0x22);
        for case in Case::ALL {
            for _ in 0..20 {
                let p = random_params(case, &mut r);
                for block in radial_stability(&p) {
                    let (sum, product) = match block.eigenvalues {
                        BlockEigenvalues::Single(v) => (v, v),
                        BlockEigenvalues::RealPair(a, b) => (a + b, a * b),
                        BlockEigenvalues::ComplexPair { re, im } => (2.0 * re, re * re + im * im),
                    };
                    let tr = block.matrix.trace();
                    let det = block.matrix.determinant();
                    assert!((sum - tr).abs() <= 1e-12 * tr.abs().max(1.0));
                    assert!((product - det).abs() <= 1e-12 * det.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn off_support_diagonal_equals_signed_named_parameters() {
        let mut r = rng(0x23);
        for case in Case::ALL {
            for _ in 0..10 {
                let p = random_params(case, &mut r);
                let system = assemble_system(&p);
                let spec = case_spec(case);
                for eq in equilibria(&p) {
                    let j = jacobian(&system, &eq.coordinates);
                    let support = spec.equilibrium_support(eq.index);
                    let report = classify(&p).unwrap();
                    for coord in 1..=4 {
                        if support.contains(coord) {
                            continue;
                        }
                        let role = report
                            .spectrum(eq.index)
                            .entry_for_coordinate(coord)
                            .unwrap()
                            .role;
                        let prefix = role.key_prefix().unwrap();
                        let key = format!("{prefix}{}{coord}", eq.index);
                        let sign = if role == Role::Expanding { 1.0 } else { -1.0 };
                        let want = sign * p.get(&key);
                        let got = j[coord - 1][coord - 1];
                        assert!(
                            (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                            "{case} xi_{} dir {coord} ({key}): {got} vs {want}",
                            eq.index
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn exactly_one_positive_eigenvalue_everywhere_for_reference_sets() {
        for preset in presets::all() {
            let report = classify(&preset.params).unwrap();
            for eq in &report.equilibria {
                let positives = eq
                    .entries
                    .iter()
                    .filter(|e| e.value.real_part() > 0.0)
                    .count();
                assert_eq!(positives, 1, "{} xi_{}", preset.name, eq.index);
            }
        }
    }

    #[test]
    fn theorem1_property_holds_for_every_case() {
        let mut r = rng(0x24);
        for case in Case::ALL {
            for _ in 0..20 {
                let p = random_params(case, &mut r);
                let report = classify(&p).unwrap();
                assert!(check_theorem1(&report), "{case}");
            }
        }
        for preset in presets::all() {
            assert!(check_theorem1(&classify(&preset.params).unwrap()));
        }
    }

    #[test]
    fn theorem1_rejects_one_contracting_role_everywhere() {
        // Hypothetical report with exactly one contracting role at every
        // equilibrium: the property must come out false.
        let base = classify(&fig_params("fig9a")).unwrap();
        let mut doctored = base.clone();
        for eq in doctored.equilibria.iter_mut() {
            for entry in eq.entries.iter_mut() {
                entry.role = Role::Transverse;
            }
            eq.entries[0].role = Role::Contracting;
        }
        assert!(!check_theorem1(&doctored));
    }

    #[test]
    fn broken_sign_structure_is_reported_as_structural() {
        // classify() cannot be fed an invalid ParameterSet, so doctor the
        // assembled interaction matrix instead: J[1][1] at xi_1 equals
        // r_2 + M_21, so a large negative M_21 kills the expanding value.
        let p = fig_params("fig9a");
        let spec = p.spec();
        let mut m = *assemble_system(&p).interactions();
        m[1][0] = -3.0;
        let system = assemble_system(&p).with_interactions(m);
        let err = classify_system(&system, &spec).unwrap_err();
        assert!(err.to_string().contains("A1"), "{err}");

        // Two positive off-support values at xi_1: make direction 3 grow too.
        let mut m = *assemble_system(&p).interactions();
        m[2][0] = 1.5; // r_3 + M_31 = 1 + 1.5 > 0 alongside e12
        let system = assemble_system(&p).with_interactions(m);
        let err = classify_system(&system, &spec).unwrap_err();
        assert!(err.to_string().contains("positive off-support"), "{err}");
    }
}
