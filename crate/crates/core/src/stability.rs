//! Transition matrices and the scalar stability index `delta`.
//!
//! Each passage `xi_{i-1} -> xi_i -> xi_{i+1}` acts on the logarithms of the
//! small coordinates as a small matrix whose shape depends on whether the two
//! equilibria sit on axes or in planes; the matrices are not necessarily
//! square. Composed around the cycle from the section coming into `xi_3`,
//! the product is 1x1 and its entry decides stability: `delta > 1` stable,
//! `delta < 1` unstable.

use crate::error::{Error, Result};
use crate::model::{wrap, Case, CaseSpec, Location, ParameterSet};
use crate::spectrum::{radial_stability, RadialBlock};

/// Dense row-major matrix for the 1x1 .. 2x2 segment shapes.
#[derive(Clone, PartialEq, Debug)]
pub struct SmallMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl SmallMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> SmallMatrix {
        assert_eq!(rows * cols, data.len());
        SmallMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    /// `self * rhs`; the inner dimensions must chain.
    pub fn mul(&self, rhs: &SmallMatrix) -> Result<SmallMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Structural(format!(
                "segment shapes do not chain: {}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut data = vec![0.0; self.rows * rhs.cols];
        for r in 0..self.rows {
            for c in 0..rhs.cols {
                let mut acc = 0.0;
                for k in 0..self.cols {
                    acc += self.get(r, k) * rhs.get(k, c);
                }
                data[r * rhs.cols + c] = acc;
            }
        }
        Ok(SmallMatrix::new(self.rows, rhs.cols, data))
    }
}

/// Eigenvalue quotients at the equilibria: `a_i^(j) = c_ij / e_out(i)` for
/// contracting directions and `b_i^(j) = t_ij / e_out(i)` for transverse
/// ones, where `e_out(i)` is the expanding eigenvalue at `xi_i`.
#[derive(Clone, Debug)]
pub struct RatioTable {
    case: Case,
    e_out: [f64; 4],
    a: [[Option<f64>; 4]; 4],
    b: [[Option<f64>; 4]; 4],
}

impl RatioTable {
    pub fn case(&self) -> Case {
        self.case
    }

    pub fn e_out(&self, i: usize) -> f64 {
        self.e_out[wrap(i as isize) - 1]
    }

    pub fn try_a(&self, i: usize, j: usize) -> Option<f64> {
        self.a[wrap(i as isize) - 1][j - 1]
    }

    pub fn try_b(&self, i: usize, j: usize) -> Option<f64> {
        self.b[wrap(i as isize) - 1][j - 1]
    }

    /// Contracting-over-expanding quotient at `xi_i` in direction `j`.
    /// Panics if direction `j` is not contracting at `xi_i`.
    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.try_a(i, j)
            .unwrap_or_else(|| panic!("no contracting direction {j} at xi_{i}"))
    }

    /// Transverse-over-expanding quotient at `xi_i` in direction `j`.
    pub fn b(&self, i: usize, j: usize) -> f64 {
        self.try_b(i, j)
            .unwrap_or_else(|| panic!("no transverse direction {j} at xi_{i}"))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 1..=4 {
            for j in 1..=4 {
                if let Some(v) = self.try_a(i, j) {
                    a.push(serde_json::json!({ "i": i, "j": j, "value": v }));
                }
                if let Some(v) = self.try_b(i, j) {
                    b.push(serde_json::json!({ "i": i, "j": j, "value": v }));
                }
            }
        }
        serde_json::json!({ "e_out": self.e_out, "a": a, "b": b })
    }
}

/// Build the ratio table from the named eigenvalue parameters.
pub fn ratios(params: &ParameterSet) -> RatioTable {
    let spec = params.spec();
    let mut e_out = [0.0; 4];
    let mut a = [[None; 4]; 4];
    let mut b = [[None; 4]; 4];
    for i in 1..=4 {
        let exp_dir = spec.expanding_direction(i);
        let e = params.get(&format!("e{i}{exp_dir}"));
        e_out[i - 1] = e;
        for j in spec.contracting_directions(i) {
            a[i - 1][j - 1] = Some(params.get(&format!("c{i}{j}")) / e);
        }
        for j in spec.transverse_directions(i) {
            b[i - 1][j - 1] = Some(params.get(&format!("t{i}{j}")) / e);
        }
    }
    RatioTable {
        case: params.case(),
        e_out,
        a,
        b,
    }
}

/// Shape class of one composed local-plus-global passage, keyed by the
/// locations of the previous and current equilibria.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SegmentKind {
    AxisToAxis,
    PlaneToPlane,
    PlaneToAxis,
    AxisToPlane,
}

impl SegmentKind {
    pub fn of(prev: Location, cur: Location) -> SegmentKind {
        match (prev, cur) {
            (Location::Axis, Location::Axis) => SegmentKind::AxisToAxis,
            (Location::Plane, Location::Plane) => SegmentKind::PlaneToPlane,
            (Location::Plane, Location::Axis) => SegmentKind::PlaneToAxis,
            (Location::Axis, Location::Plane) => SegmentKind::AxisToPlane,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SegmentKind::AxisToAxis => "axis-axis",
            SegmentKind::PlaneToPlane => "plane-plane",
            SegmentKind::PlaneToAxis => "plane-axis",
            SegmentKind::AxisToPlane => "axis-plane",
        }
    }
}

/// Transition matrix of the passage through `xi_i`, acting on the logs of
/// the small coordinates on the incoming section.
#[derive(Clone, Debug)]
pub struct SegmentMatrix {
    pub at: usize,
    pub kind: SegmentKind,
    pub matrix: SmallMatrix,
}

impl SegmentMatrix {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "at": self.at,
            "kind": self.kind.label(),
            "rows": self.matrix.rows(),
            "cols": self.matrix.cols(),
            "entries": self.matrix.entries(),
        })
    }
}

/// The segment matrix at `xi_i` for the stated pair of locations. The pair
/// must match the case's support sequence.
pub fn segment_matrix(
    prev_loc: Location,
    cur_loc: Location,
    ratios: &RatioTable,
    i: usize,
) -> Result<SegmentMatrix> {
    let spec = CaseSpec::of(ratios.case());
    if spec.location(i) != cur_loc || spec.location(wrap(i as isize - 1)) != prev_loc {
        return Err(Error::Structural(format!(
            "segment ({prev_loc}, {cur_loc}) at xi_{i} is inconsistent with {}: \
             xi_{} is on a {}, xi_{i} is on a {}",
            ratios.case(),
            wrap(i as isize - 1),
            spec.location(wrap(i as isize - 1)),
            spec.location(i),
        )));
    }
    let m2 = wrap(i as isize - 2);
    let m1 = wrap(i as isize - 1);
    let kind = SegmentKind::of(prev_loc, cur_loc);
    let matrix = match kind {
        SegmentKind::AxisToAxis => {
            SmallMatrix::new(2, 2, vec![ratios.b(i, m2), 1.0, ratios.a(i, m1), 0.0])
        }
        SegmentKind::PlaneToPlane => SmallMatrix::new(1, 1, vec![ratios.a(i, m2)]),
        SegmentKind::PlaneToAxis => SmallMatrix::new(2, 1, vec![ratios.a(i, m2), ratios.a(i, m1)]),
        SegmentKind::AxisToPlane => SmallMatrix::new(1, 2, vec![ratios.b(i, m2), 1.0]),
    };
    Ok(SegmentMatrix {
        at: i,
        kind,
        matrix,
    })
}

fn segment_at(ratios: &RatioTable, i: usize) -> Result<SegmentMatrix> {
    let spec = CaseSpec::of(ratios.case());
    segment_matrix(
        spec.location(wrap(i as isize - 1)),
        spec.location(i),
        ratios,
        i,
    )
}

/// Product of the four segment matrices around the cycle, starting from the
/// section coming into `xi_start`; matrices are applied in cycle order, so
/// the product is `seg(start+3) .. seg(start)`.
fn cycle_product(ratios: &RatioTable, start: usize) -> Result<(Vec<SegmentMatrix>, SmallMatrix)> {
    let order: Vec<usize> = (0..4).map(|k| wrap(start as isize + k)).collect();
    let mut segments = Vec::with_capacity(4);
    for &i in &order {
        segments.push(segment_at(ratios, i)?);
    }
    let mut acc = segments[0].matrix.clone();
    for seg in &segments[1..] {
        acc = seg.matrix.mul(&acc)?;
    }
    Ok((segments, acc))
}

/// Stability verdict derived from `delta`, with a band of width 1e-9 around
/// `delta = 1` reported as marginal.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Prediction {
    Stable,
    Unstable,
    Marginal,
}

impl Prediction {
    pub fn label(self) -> &'static str {
        match self {
            Prediction::Stable => "stable",
            Prediction::Unstable => "unstable",
            Prediction::Marginal => "marginal",
        }
    }

    fn from_delta(delta: f64) -> Prediction {
        const EPS: f64 = 1e-9;
        if delta > 1.0 + EPS {
            Prediction::Stable
        } else if delta < 1.0 - EPS {
            Prediction::Unstable
        } else {
            Prediction::Marginal
        }
    }
}

/// Full stability computation for one parameter set.
#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub params: ParameterSet,
    pub ratios: RatioTable,
    /// Segments in cycle order from the section coming into `xi_3`.
    pub segments: Vec<SegmentMatrix>,
    pub delta: f64,
    pub predicted: Prediction,
    pub radial: [RadialBlock; 4],
}

impl StabilityReport {
    pub fn case(&self) -> Case {
        self.params.case()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "case": self.case().id(),
            "delta": self.delta,
            "predicted": self.predicted.label(),
            "params": self.params.to_json_value(),
            "ratios": self.ratios.to_json_value(),
            "segments": self.segments.iter().map(SegmentMatrix::to_json_value).collect::<Vec<_>>(),
            "radial": self.radial.iter().map(RadialBlock::to_json_value).collect::<Vec<_>>(),
        })
    }
}

/// The scalar index alone, without the radial verdicts.
pub fn delta_value(params: &ParameterSet) -> Result<f64> {
    let table = ratios(params);
    let (_, product) = cycle_product(&table, 3)?;
    if (product.rows(), product.cols()) != (1, 1) {
        return Err(Error::Structural(format!(
            "cycle product from the section into xi_3 is {}x{}, expected 1x1",
            product.rows(),
            product.cols()
        )));
    }
    Ok(product.get(0, 0))
}

/// Compose the segment chain from the section coming into `xi_3` and report
/// `delta`, the predicted stability, and the radial verdicts.
pub fn delta(params: &ParameterSet) -> Result<StabilityReport> {
    let table = ratios(params);
    let (segments, product) = cycle_product(&table, 3)?;
    if (product.rows(), product.cols()) != (1, 1) {
        return Err(Error::Structural(format!(
            "cycle product from the section into xi_3 is {}x{}, expected 1x1",
            product.rows(),
            product.cols()
        )));
    }
    let delta = product.get(0, 0);
    Ok(StabilityReport {
        params: params.clone(),
        ratios: table,
        segments,
        delta,
        predicted: Prediction::from_delta(delta),
        radial: radial_stability(params),
    })
}

/// Eigenvalues of the cycle product started at the section coming into
/// `xi_start`. Starts that produce 2x2 products have spectrum `{0, delta}`;
/// 1x1 starts give `{delta}`. Sorted descending.
pub fn cyclic_spectrum(params: &ParameterSet, start: usize) -> Result<Vec<f64>> {
    if !(1..=4).contains(&start) {
        return Err(Error::InvalidInput(format!(
            "start section must be 1..4, got {start}"
        )));
    }
    let table = ratios(params);
    let (_, product) = cycle_product(&table, start)?;
    match (product.rows(), product.cols()) {
        (1, 1) => Ok(vec![product.get(0, 0)]),
        (2, 2) => {
            let tr = product.get(0, 0) + product.get(1, 1);
            let det = product.get(0, 0) * product.get(1, 1) - product.get(0, 1) * product.get(1, 0);
            let disc = (tr * tr - 4.0 * det).max(0.0);
            let s = disc.sqrt();
            Ok(vec![(tr + s) / 2.0, (tr - s) / 2.0])
        }
        (r, c) => Err(Error::Structural(format!(
            "cycle product from start {start} is {r}x{c}"
        ))),
    }
}

/// One sweep of `delta` over a parameter grid, with the refined roots of
/// `delta = 1`.
#[derive(Clone, Debug)]
pub struct Sweep {
    /// `(parameter value, delta)` pairs on the grid, in ascending order.
    pub points: Vec<(f64, f64)>,
    /// Roots of `delta = 1`, refined to a parameter width below 1e-10.
    pub roots: Vec<f64>,
}

/// Sample `delta` over `[lo, hi]` on `n` grid points, moving all `keys`
/// together through the same value, and bisect every sign change of
/// `delta - 1`.
pub fn boundary_sweep(
    params: &ParameterSet,
    keys: &[&str],
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<Sweep> {
    if keys.is_empty() {
        return Err(Error::InvalidInput("sweep needs at least one key".into()));
    }
    if lo >= hi || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInput(format!(
            "sweep range must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "sweep grid needs at least 2 points, got {n}"
        )));
    }
    let apply = |value: f64| -> Result<f64> {
        let mut p = params.clone();
        for key in keys {
            p = p.with_value(key, value)?;
        }
        delta_value(&p)
    };

    let mut points = Vec::with_capacity(n);
    for k in 0..n {
        let v = lo + (hi - lo) * k as f64 / (n - 1) as f64;
        points.push((v, apply(v)?));
    }

    let mut roots = Vec::new();
    for w in points.windows(2) {
        let (v0, d0) = w[0];
        let (v1, d1) = w[1];
        let f0 = d0 - 1.0;
        let f1 = d1 - 1.0;
        if f0 == 0.0 {
            roots.push(v0);
            continue;
        }
        if f0 * f1 < 0.0 {
            let (mut a, mut b) = (v0, v1);
            let mut fa = f0;
            while b - a > 1e-10 {
                let mid = 0.5 * (a + b);
                let fm = apply(mid)? - 1.0;
                if fm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if fa * fm < 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
    }
    if let Some(&(v_last, d_last)) = points.last() {
        if d_last == 1.0 {
            roots.push(v_last);
        }
    }
    Ok(Sweep { points, roots })
}
