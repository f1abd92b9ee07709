//! Rate regions as intersections of half-planes in the nonnegative quadrant.
//!
//! Every constraint has the form `c1·R1 + c2·R2 ≤ v` with `c1, c2 ≥ 0`, so
//! the region is convex and its Pareto boundary is the lower envelope of the
//! constraint lines, clipped to `R1, R2 ≥ 0`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::channel::{single_user_capacities, tdm_fdm_point, tin_rates, RatePoint, TwoUserChannel};
use crate::error::{Error, Result};
use crate::genie::{eta1_range, eta2_range, eval_constraint2, eval_constraint3, optimize_constraint1_with, SupportingLine};
use crate::par::Execution;

/// Slack tolerated by [`RateRegion::contains`].
pub const CONTAINMENT_TOL: f64 = 1e-9;
/// Slopes and abscissae closer than this are merged.
pub const COLLINEAR_TOL: f64 = 1e-12;

pub const MU_MIN: f64 = 1.0 / 64.0;
pub const MU_MAX: f64 = 64.0;

/// Number of time-sharing fractions used for the orthogonal-access points.
const TDM_POINTS: usize = 33;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum ConstraintSource {
    /// `R1 ≤ ½log₂(1+P1)`.
    Cap1,
    /// `R2 ≤ ½log₂(1+P2)`.
    Cap2,
    Genie { line: SupportingLine },
    /// Edge of an achievable convex hull.
    HullEdge,
    /// Caller-supplied constraint.
    Custom,
}

/// `c1·R1 + c2·R2 ≤ value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub c1: f64,
    pub c2: f64,
    pub value: f64,
    pub source: ConstraintSource,
}

impl HalfPlane {
    pub fn new(c1: f64, c2: f64, value: f64) -> Result<Self> {
        if !(c1 >= 0.0 && c2 >= 0.0 && (c1 > 0.0 || c2 > 0.0)) || !value.is_finite() {
            return Err(Error::domain(format!("invalid half-plane {c1}·R1 + {c2}·R2 ≤ {value}")));
        }
        Ok(HalfPlane { c1, c2, value, source: ConstraintSource::Custom })
    }

    pub fn from_line(line: SupportingLine) -> Self {
        HalfPlane { c1: 1.0, c2: line.weight, value: line.value, source: ConstraintSource::Genie { line } }
    }

    /// `value − c·pt`; nonnegative inside.
    pub fn slack(&self, pt: &RatePoint) -> f64 {
        self.value - self.c1 * pt.r1 - self.c2 * pt.r2
    }
}

/// What pins a boundary vertex down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Defining {
    Constraint(usize),
    /// `R1 = 0`.
    AxisR1,
    /// `R2 = 0`.
    AxisR2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryVertex {
    pub point: RatePoint,
    pub defined_by: [Defining; 2],
}

#[derive(Debug)]
pub struct RateRegion {
    constraints: Vec<HalfPlane>,
    boundary: OnceLock<Result<Vec<BoundaryVertex>>>,
}

impl Clone for RateRegion {
    fn clone(&self) -> Self {
        RateRegion { constraints: self.constraints.clone(), boundary: OnceLock::new() }
    }
}

impl RateRegion {
    /// Region cut out by `constraints`; at least one must bound each rate.
    pub fn new(constraints: Vec<HalfPlane>) -> Result<Self> {
        if !constraints.iter().any(|h| h.c1 > 0.0) || !constraints.iter().any(|h| h.c2 > 0.0) {
            return Err(Error::domain("a region needs constraints bounding both rates"));
        }
        Ok(RateRegion { constraints, boundary: OnceLock::new() })
    }

    /// Region bounded by the two single-user caps plus `extra`.
    pub fn with_caps(ch: &TwoUserChannel, extra: impl IntoIterator<Item = HalfPlane>) -> Self {
        let caps = single_user_capacities(ch);
        let mut constraints = vec![
            HalfPlane { c1: 1.0, c2: 0.0, value: caps.r1, source: ConstraintSource::Cap1 },
            HalfPlane { c1: 0.0, c2: 1.0, value: caps.r2, source: ConstraintSource::Cap2 },
        ];
        constraints.extend(extra);
        RateRegion { constraints, boundary: OnceLock::new() }
    }

    pub fn constraints(&self) -> &[HalfPlane] {
        &self.constraints
    }

    /// Supporting lines from the genie families, in insertion order.
    pub fn lines(&self) -> impl Iterator<Item = &SupportingLine> {
        self.constraints.iter().filter_map(|h| match &h.source {
            ConstraintSource::Genie { line } => Some(line),
            _ => None,
        })
    }

    /// True iff `pt` is in the quadrant and violates no constraint by more
    /// than `1e-9`.
    pub fn contains(&self, pt: &RatePoint) -> bool {
        pt.r1 >= -CONTAINMENT_TOL
            && pt.r2 >= -CONTAINMENT_TOL
            && self.constraints.iter().all(|h| h.slack(pt) >= -CONTAINMENT_TOL)
    }

    /// Pareto boundary from `(0, R2max)` to `(R1max, 0)`, computed once.
    pub fn boundary(&self) -> Result<&[BoundaryVertex]> {
        self.boundary
            .get_or_init(|| envelope(&self.constraints))
            .as_ref()
            .map(Vec::as_slice)
            .map_err(Clone::clone)
    }

    pub fn boundary_points(&self) -> Result<Vec<RatePoint>> {
        Ok(self.boundary()?.iter().map(|v| v.point).collect())
    }

    /// `max d·R` over the region for a direction with `d1, d2 ≥ 0`.
    pub fn support(&self, d1: f64, d2: f64) -> Result<f64> {
        Ok(self
            .boundary()?
            .iter()
            .map(|v| d1 * v.point.r1 + d2 * v.point.r2)
            .fold(f64::NEG_INFINITY, f64::max))
    }
}

/// A non-vertical constraint as `R2 ≤ intercept + slope·R1`.
#[derive(Debug, Clone, Copy)]
struct Line {
    slope: f64,
    intercept: f64,
    idx: usize,
}

impl Line {
    fn at(&self, r1: f64) -> f64 {
        self.intercept + self.slope * r1
    }

    /// Abscissa where `self` and a steeper `other` cross.
    fn crossing(&self, other: &Line) -> f64 {
        (other.intercept - self.intercept) / (self.slope - other.slope)
    }
}

fn envelope(constraints: &[HalfPlane]) -> Result<Vec<BoundaryVertex>> {
    let mut lines: Vec<Line> = constraints
        .iter()
        .enumerate()
        .filter(|(_, h)| h.c2 > 0.0)
        .map(|(idx, h)| Line { slope: -h.c1 / h.c2, intercept: h.value / h.c2, idx })
        .collect();
    let (x_cap, cap_idx) = constraints
        .iter()
        .enumerate()
        .filter(|(_, h)| h.c2 == 0.0)
        .map(|(i, h)| (h.value / h.c1, i))
        .fold((f64::INFINITY, usize::MAX), |acc, c| if c.0 < acc.0 { c } else { acc });
    if lines.is_empty() {
        return Err(Error::EmptyRegion("no constraint bounds R2".into()));
    }
    if x_cap < -COLLINEAR_TOL {
        return Err(Error::EmptyRegion(format!("R1 cap {x_cap} is negative")));
    }
    let x_cap = x_cap.max(0.0);

    // Flattest first; among parallel lines keep the lowest.
    lines.sort_by(|p, q| q.slope.total_cmp(&p.slope).then(p.intercept.total_cmp(&q.intercept)).then(p.idx.cmp(&q.idx)));
    let mut hull: Vec<Line> = Vec::with_capacity(lines.len());
    for line in lines {
        if let Some(last) = hull.last() {
            if (last.slope - line.slope).abs() <= COLLINEAR_TOL * last.slope.abs().max(1.0) {
                continue;
            }
        }
        while hull.len() >= 2 {
            let l1 = hull[hull.len() - 2];
            let l2 = hull[hull.len() - 1];
            if l1.crossing(&line) <= l1.crossing(&l2) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(line);
    }

    // Active line at R1 = 0, then walk right.
    let mut k = 0;
    while k + 1 < hull.len() && hull[k].crossing(&hull[k + 1]) <= 0.0 {
        k += 1;
    }
    let top = hull[k].at(0.0);
    if top < -COLLINEAR_TOL {
        return Err(Error::EmptyRegion(format!("envelope is negative at R1 = 0 ({top})")));
    }
    let mut vertices = vec![BoundaryVertex {
        point: RatePoint { r1: 0.0, r2: top.max(0.0) },
        defined_by: [Defining::AxisR1, Defining::Constraint(hull[k].idx)],
    }];
    if top <= 0.0 {
        return Ok(vertices);
    }
    loop {
        let line = hull[k];
        // Where this line leaves the quadrant, if it slopes down.
        let zero = if line.slope < 0.0 { -line.intercept / line.slope } else { f64::INFINITY };
        let next = (k + 1 < hull.len()).then(|| line.crossing(&hull[k + 1]));
        let stop = zero.min(x_cap);
        match next {
            Some(x) if x < stop => {
                let last = vertices.last().expect("nonempty").point.r1;
                if x > last + COLLINEAR_TOL {
                    vertices.push(BoundaryVertex {
                        point: RatePoint { r1: x, r2: line.at(x).max(0.0) },
                        defined_by: [Defining::Constraint(line.idx), Defining::Constraint(hull[k + 1].idx)],
                    });
                }
                k += 1;
            }
            _ => {
                if zero <= x_cap {
                    vertices.push(BoundaryVertex {
                        point: RatePoint { r1: zero, r2: 0.0 },
                        defined_by: [Defining::Constraint(line.idx), Defining::AxisR2],
                    });
                } else {
                    let r2 = line.at(x_cap).max(0.0);
                    vertices.push(BoundaryVertex {
                        point: RatePoint { r1: x_cap, r2 },
                        defined_by: [Defining::Constraint(line.idx), Defining::Constraint(cap_idx)],
                    });
                    if r2 > 0.0 {
                        vertices.push(BoundaryVertex {
                            point: RatePoint { r1: x_cap, r2: 0.0 },
                            defined_by: [Defining::Constraint(cap_idx), Defining::AxisR2],
                        });
                    }
                }
                break;
            }
        }
    }
    Ok(vertices)
}

/// Log-spaced weights on `[1/64, 64]` including `μ = 1`.
pub fn mu_grid(points: usize) -> Vec<f64> {
    let span = MU_MAX.log2() - MU_MIN.log2();
    let mut grid: Vec<f64> = (0..points)
        .map(|k| (MU_MIN.log2() + span * k as f64 / (points - 1) as f64).exp2())
        .collect();
    if !grid.contains(&1.0) {
        let nearest = (0..points)
            .min_by(|&i, &j| grid[i].log2().abs().total_cmp(&grid[j].log2().abs()))
            .expect("nonempty grid");
        grid[nearest] = 1.0;
    }
    grid
}

fn uniform_grid((lo, hi): (f64, f64), points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| if k + 1 == points { hi } else { lo + (hi - lo) * k as f64 / (points - 1) as f64 })
        .collect()
}

/// Outer bound on the capacity region from all three genie families.
pub fn build_outer_region(ch: &TwoUserChannel, mu_points: usize, eta_points: usize) -> Result<RateRegion> {
    build_outer_region_with(ch, mu_points, eta_points, Execution::default())
}

pub fn build_outer_region_with(
    ch: &TwoUserChannel,
    mu_points: usize,
    eta_points: usize,
    exec: Execution,
) -> Result<RateRegion> {
    if !ch.in_weak_regime() {
        return Err(Error::domain(format!(
            "outer region needs 0 < a < 1 and 0 < b < 1 (a={}, b={})",
            ch.a(),
            ch.b()
        )));
    }
    if mu_points < 3 || eta_points < 2 {
        return Err(Error::domain(format!(
            "grid sizes too small (mu_grid={mu_points} >= 3, eta_grid={eta_points} >= 2 required)"
        )));
    }
    let mus = mu_grid(mu_points);
    let mu_lines = exec.map(&mus, |&mu| optimize_constraint1_with(ch, mu, exec));
    let mut extra = Vec::with_capacity(mu_points + 2 * eta_points);
    for line in mu_lines {
        extra.push(HalfPlane::from_line(line?));
    }
    for eta in uniform_grid(eta1_range(ch)?, eta_points) {
        extra.push(HalfPlane::from_line(eval_constraint2(ch, eta)?));
    }
    for eta in uniform_grid(eta2_range(ch)?, eta_points) {
        extra.push(HalfPlane::from_line(eval_constraint3(ch, eta)?));
    }
    Ok(RateRegion::with_caps(ch, extra))
}

/// Points whose convex hull is the achievable comparison region.
pub fn inner_points(ch: &TwoUserChannel) -> Vec<RatePoint> {
    let caps = single_user_capacities(ch);
    let mut pts = vec![
        RatePoint { r1: 0.0, r2: 0.0 },
        RatePoint { r1: caps.r1, r2: 0.0 },
        RatePoint { r1: 0.0, r2: caps.r2 },
        tin_rates(ch),
    ];
    pts.extend((0..TDM_POINTS).map(|k| {
        tdm_fdm_point(ch, k as f64 / (TDM_POINTS - 1) as f64).expect("fraction in [0, 1]")
    }));
    pts
}

/// Convex hull of single-user corners, the treat-interference-as-noise point
/// and orthogonal time/frequency-sharing points; every point inside is
/// achievable by time sharing.
pub fn build_inner_region(ch: &TwoUserChannel) -> RateRegion {
    let mut pts = inner_points(ch);
    pts.sort_by(|p, q| p.r1.total_cmp(&q.r1).then(q.r2.total_cmp(&p.r2)));
    // Upper-right chain from the R2-axis point with the largest R2.
    let mut chain: Vec<RatePoint> = Vec::new();
    for p in pts.iter().copied() {
        while chain.len() >= 2 {
            let o = chain[chain.len() - 2];
            let a = chain[chain.len() - 1];
            let cross = (a.r1 - o.r1) * (p.r2 - o.r2) - (a.r2 - o.r2) * (p.r1 - o.r1);
            if cross >= 0.0 {
                chain.pop();
            } else {
                break;
            }
        }
        chain.push(p);
    }
    let edges = chain.windows(2).filter_map(|w| {
        let (p, q) = (w[0], w[1]);
        let (n1, n2) = (p.r2 - q.r2, q.r1 - p.r1);
        if !(n1 >= 0.0 && n2 >= 0.0) || (n1 == 0.0 && n2 == 0.0) {
            return None;
        }
        let scale = if n1 > 0.0 { n1 } else { n2 };
        let (c1, c2) = (n1 / scale, n2 / scale);
        Some(HalfPlane { c1, c2, value: c1 * p.r1 + c2 * p.r2, source: ConstraintSource::HullEdge })
    });
    RateRegion::with_caps(ch, edges.collect::<Vec<_>>())
}
