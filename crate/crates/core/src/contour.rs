//! Integration contours and their discretization.
//!
//! Infinite paths (vertical lines, rays) always carry a finite truncation;
//! callers are responsible for checking that the discarded tails are small.

use crate::prelude::*;
use crate::quadrature::{gauss_legendre, QuadratureGrid};
use crate::specfun::check_finite;
use core::f64::consts::{FRAC_PI_3, PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum SegmentKind {
    /// `center + radius e^{iθ}` for `θ` from `start_angle` to `end_angle`;
    /// `end_angle > start_angle` runs counter-clockwise.
    CircleArc {
        center: C64,
        radius: f64,
        start_angle: f64,
        end_angle: f64,
    },
    LineSegment {
        start: C64,
        end: C64,
    },
    /// `base + s e^{i angle}` for `s ∈ [0, length]`, running outward.
    Ray {
        base: C64,
        angle: f64,
        length: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Orientation {
    #[default]
    Forward,
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContourSegment {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub kind: SegmentKind,
    #[cfg_attr(feature = "serde", serde(default))]
    pub orientation: Orientation,
}

impl ContourSegment {
    pub fn new(kind: SegmentKind, orientation: Orientation) -> Result<Self> {
        let seg = Self { kind, orientation };
        seg.validate()?;
        Ok(seg)
    }

    pub fn forward(kind: SegmentKind) -> Result<Self> {
        Self::new(kind, Orientation::Forward)
    }

    pub fn reverse(kind: SegmentKind) -> Result<Self> {
        Self::new(kind, Orientation::Reverse)
    }

    fn validate(&self) -> Result<()> {
        match self.kind {
            SegmentKind::CircleArc { center, radius, start_angle, end_angle } => {
                check_finite(center, "arc center")?;
                if !(radius > 0.0) || !radius.is_finite() {
                    return Err(Error::domain(format!("arc radius must be positive, got {radius}")));
                }
                if !(start_angle.is_finite() && end_angle.is_finite()) || start_angle == end_angle {
                    return Err(Error::domain("arc span must be non-zero"));
                }
            }
            SegmentKind::LineSegment { start, end } => {
                check_finite(start, "segment start")?;
                check_finite(end, "segment end")?;
                if start == end {
                    return Err(Error::domain("line segment must have positive length"));
                }
            }
            SegmentKind::Ray { base, angle, length } => {
                check_finite(base, "ray base")?;
                if !angle.is_finite() {
                    return Err(Error::domain("ray angle must be finite"));
                }
                if !(length > 0.0) || !length.is_finite() {
                    return Err(Error::domain(format!("ray truncation must be positive and finite, got {length}")));
                }
            }
        }
        Ok(())
    }

    /// Point at the natural parameter `t ∈ [0, 1]` (ignoring orientation).
    fn point(&self, t: f64) -> C64 {
        match self.kind {
            SegmentKind::CircleArc { center, radius, start_angle, end_angle } => {
                center + C64::from_polar(radius, start_angle + t * (end_angle - start_angle))
            }
            SegmentKind::LineSegment { start, end } => start + (end - start) * t,
            SegmentKind::Ray { base, angle, length } => base + C64::from_polar(t * length, angle),
        }
    }

    /// `dz/dt` at the natural parameter.
    fn derivative(&self, t: f64) -> C64 {
        match self.kind {
            SegmentKind::CircleArc { radius, start_angle, end_angle, .. } => {
                let span = end_angle - start_angle;
                I * C64::from_polar(radius * span, start_angle + t * span)
            }
            SegmentKind::LineSegment { start, end } => end - start,
            SegmentKind::Ray { angle, length, .. } => C64::from_polar(length, angle),
        }
    }

    pub fn start(&self) -> C64 {
        match self.orientation {
            Orientation::Forward => self.point(0.0),
            Orientation::Reverse => self.point(1.0),
        }
    }

    pub fn end(&self) -> C64 {
        match self.orientation {
            Orientation::Forward => self.point(1.0),
            Orientation::Reverse => self.point(0.0),
        }
    }

    pub fn length(&self) -> f64 {
        match self.kind {
            SegmentKind::CircleArc { radius, start_angle, end_angle, .. } => radius * (end_angle - start_angle).abs(),
            SegmentKind::LineSegment { start, end } => (end - start).norm(),
            SegmentKind::Ray { length, .. } => length,
        }
    }

    fn is_full_circle(&self) -> bool {
        matches!(self.kind, SegmentKind::CircleArc { start_angle, end_angle, .. }
            if ((end_angle - start_angle).abs() - TAU).abs() < 1e-14)
    }

    pub fn reversed(&self) -> Self {
        let orientation = match self.orientation {
            Orientation::Forward => Orientation::Reverse,
            Orientation::Reverse => Orientation::Forward,
        };
        Self { kind: self.kind, orientation }
    }

    /// Panel breakpoints in the natural parameter, graded per `grading`.
    fn panel_breaks(&self, grading: &PanelGrading) -> Vec<f64> {
        let len = self.length();
        match self.kind {
            SegmentKind::Ray { .. } => graded_breaks(len, grading).into_iter().map(|s| s / len).collect(),
            SegmentKind::LineSegment { .. } => {
                // graded outward from the midpoint in both directions
                let half = graded_breaks(len / 2.0, grading);
                let mut breaks: Vec<f64> = half.iter().rev().map(|s| 0.5 - s / len).collect();
                breaks.extend(half.iter().skip(1).map(|s| 0.5 + s / len));
                breaks
            }
            SegmentKind::CircleArc { .. } => {
                let panels = if grading.max.is_finite() { (len / grading.max).ceil().max(1.0) as usize } else { 1 };
                (0..=panels).map(|k| k as f64 / panels as f64).collect()
            }
        }
    }
}

fn graded_breaks(length: f64, grading: &PanelGrading) -> Vec<f64> {
    let mut breaks = vec![0.0];
    let mut h = grading.first.min(grading.max);
    let mut s = 0.0;
    while s < length {
        // absorb a short remainder into the last panel
        if s + 1.5 * h >= length {
            s = length;
        } else {
            s += h;
        }
        breaks.push(s);
        h = (h * grading.growth).min(grading.max);
    }
    breaks
}

/// Composite Gauss-Legendre panel sizes: the first panel (at a ray base or
/// a line midpoint) has length `first`, each next one is `growth` times longer,
/// capped at `max`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PanelGrading {
    pub first: f64,
    pub growth: f64,
    pub max: f64,
}

impl PanelGrading {
    /// One panel per segment.
    pub const SINGLE: PanelGrading = PanelGrading { first: f64::INFINITY, growth: 1.0, max: f64::INFINITY };

    pub fn geometric(first: f64, growth: f64, max: f64) -> Self {
        Self { first, growth, max }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Contour {
    pub segments: Vec<ContourSegment>,
    pub closed: bool,
}

impl Contour {
    pub fn new(segments: Vec<ContourSegment>, closed: bool) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::domain("a contour needs at least one segment"));
        }
        for seg in &segments {
            seg.validate()?;
        }
        let c = Self { segments, closed };
        if closed {
            let n = c.segments.len();
            for k in 0..n {
                let a = c.segments[k].end();
                let b = c.segments[(k + 1) % n].start();
                if (a - b).norm() > 1e-12 {
                    return Err(Error::domain(format!(
                        "closed contour has a gap between segments {k} and {}",
                        (k + 1) % n
                    )));
                }
            }
        }
        Ok(c)
    }

    pub fn reversed(&self) -> Self {
        Self { segments: self.segments.iter().rev().map(|s| s.reversed()).collect(), closed: self.closed }
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(|s| s.length()).sum()
    }
}

/// Positively oriented circle `|z - center| = radius`.
pub fn circle_contour(radius: f64, center: C64) -> Result<Contour> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::domain(format!("circle radius must be positive, got {radius}")));
    }
    let seg = ContourSegment::forward(SegmentKind::CircleArc { center, radius, start_angle: -PI, end_angle: PI })?;
    Contour::new(vec![seg], true)
}

/// Upward vertical segment `Re z = delta`, `|Im z| <= half_height`; a negative
/// `delta` gives the mirrored line `-ℓ_{|delta|}`.
pub fn vertical_line(delta: f64, half_height: f64) -> Result<Contour> {
    if !(half_height > 0.0) || !half_height.is_finite() {
        return Err(Error::domain(format!("half_height must be positive, got {half_height}")));
    }
    let seg = ContourSegment::forward(SegmentKind::LineSegment {
        start: C64::new(delta, -half_height),
        end: C64::new(delta, half_height),
    })?;
    Contour::new(vec![seg], false)
}

/// `|1/2 + e^{2πi/3}|`, the radius of the arc of the scaled descent contour.
pub fn descent_arc_radius() -> f64 {
    (C64::new(0.5, 0.0) + C64::from_polar(1.0, 2.0 * PI / 3.0)).norm()
}

/// The steep-descent contour `γ C_f` for `v`: a segment from `γ/2` to
/// `γ(1/2 + e^{2πi/3})`, the counter-clockwise arc about the origin down to
/// `γ(1/2 + e^{-2πi/3})`, and a segment back to `γ/2`.
pub fn steep_descent_v_contour(gamma: f64) -> Result<Contour> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::domain(format!("gamma must be positive, got {gamma}")));
    }
    let crit = C64::new(gamma / 2.0, 0.0);
    let top = crit + C64::from_polar(gamma, 2.0 * PI / 3.0);
    let bottom = top.conj();
    let radius = top.norm();
    let arc_start = top.arg();
    let arc_end = TAU - arc_start;
    let segments = vec![
        ContourSegment::forward(SegmentKind::LineSegment { start: crit, end: top })?,
        ContourSegment::forward(SegmentKind::CircleArc {
            center: C64::new(0.0, 0.0),
            radius,
            start_angle: arc_start,
            end_angle: arc_end,
        })?,
        ContourSegment::forward(SegmentKind::LineSegment { start: bottom, end: crit })?,
    ];
    Contour::new(segments, true)
}

/// The wedge `C_{<,n}` for `w`: rays at angles `±π/3` from `γ/2 + n^{-1/3}`,
/// truncated at `truncation`, oriented from lower to upper.
pub fn wedge_w_contour(gamma: f64, n: u64, truncation: f64) -> Result<Contour> {
    if !(gamma > 0.0) || n == 0 || !(truncation > 0.0) {
        return Err(Error::domain("wedge contour needs gamma > 0, n >= 1, truncation > 0"));
    }
    let base = C64::new(gamma / 2.0 + (n as f64).powf(-1.0 / 3.0), 0.0);
    wedge(base, FRAC_PI_3, truncation)
}

fn wedge(base: C64, angle: f64, truncation: f64) -> Result<Contour> {
    let segments = vec![
        ContourSegment::reverse(SegmentKind::Ray { base, angle: -angle, length: truncation })?,
        ContourSegment::forward(SegmentKind::Ray { base, angle, length: truncation })?,
    ];
    Contour::new(segments, false)
}

/// Contours for the limiting kernel: `ṽ` on `e^{±2πi/3} R_+` through the
/// origin and `w̃` on `e^{±πi/3} R_+ + shift`, both running upward.
pub fn limiting_contours(shift: f64, truncation: f64) -> Result<(Contour, Contour)> {
    if !(shift > 0.0) || !(truncation > 0.0) {
        return Err(Error::domain("limiting contours need shift > 0 and truncation > 0"));
    }
    let v = wedge(C64::new(0.0, 0.0), 2.0 * FRAC_PI_3, truncation)?;
    let w = wedge(C64::new(shift, 0.0), FRAC_PI_3, truncation)?;
    Ok((v, w))
}

/// Discretize with one Gauss-Legendre panel of `order` nodes per segment;
/// full circles use the `order`-point periodic trapezoid rule.
pub fn discretize(contour: &Contour, order: usize) -> Result<QuadratureGrid> {
    discretize_graded(contour, order, &PanelGrading::SINGLE)
}

/// Discretize with composite Gauss-Legendre panels (`order` nodes each).
pub fn discretize_graded(contour: &Contour, order: usize, grading: &PanelGrading) -> Result<QuadratureGrid> {
    if order < 2 {
        return Err(Error::domain(format!("quadrature order must be >= 2, got {order}")));
    }
    if !(grading.first > 0.0 && grading.growth >= 1.0 && grading.max > 0.0) {
        return Err(Error::domain("panel grading needs first > 0, growth >= 1, max > 0"));
    }
    let (gl_x, gl_w) = gauss_legendre(order);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for seg in &contour.segments {
        let sign = match seg.orientation {
            Orientation::Forward => 1.0,
            Orientation::Reverse => -1.0,
        };
        let mut seg_nodes = Vec::new();
        let mut seg_weights = Vec::new();
        if seg.is_full_circle() {
            for k in 0..order {
                let t = (k as f64 + 0.5) / order as f64;
                seg_nodes.push(seg.point(t));
                seg_weights.push(seg.derivative(t) * (sign / order as f64) * INV_TWO_PI_I);
            }
        } else {
            let breaks = seg.panel_breaks(grading);
            for p in breaks.windows(2) {
                let (a, b) = (p[0], p[1]);
                let half = 0.5 * (b - a);
                let mid = 0.5 * (a + b);
                for (x, w) in gl_x.iter().zip(&gl_w) {
                    let t = mid + half * x;
                    seg_nodes.push(seg.point(t));
                    seg_weights.push(seg.derivative(t) * (sign * half * w) * INV_TWO_PI_I);
                }
            }
        }
        if seg.orientation == Orientation::Reverse {
            seg_nodes.reverse();
            seg_weights.reverse();
        }
        nodes.extend(seg_nodes);
        weights.extend(seg_weights);
    }
    QuadratureGrid::new(nodes, weights)
}
