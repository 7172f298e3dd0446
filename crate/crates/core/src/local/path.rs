use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// One smooth piece of a path, parameterized by `t` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum PathPiece {
    /// `center + radius e^{i(start_angle + 2 pi turns t)}`; negative `turns`
    /// runs clockwise.
    Circle {
        center: Complex64,
        radius: f64,
        start_angle: f64,
        turns: f64,
    },
    /// Straight segments through the points in order.
    Polyline(Vec<Complex64>),
    /// `s direction` for `s` from `t0` to `t1`.
    Ray { t0: f64, t1: f64, direction: Complex64 },
    /// `e^{t lambda} z`: the path of the groupoid arrow `(lambda, z)`.
    Arrow { lambda: Complex64, z: Complex64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Forward,
    Reverse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    pub pieces: Vec<PathPiece>,
    pub orientation: Orientation,
}

/// A piece reduced to a point map and a bound on `|dz/dt|`.
#[derive(Debug, Clone)]
pub(crate) struct Segment {
    piece: PathPiece,
    reversed: bool,
}

impl PathPiece {
    fn point(&self, t: f64) -> Complex64 {
        match self {
            PathPiece::Circle {
                center,
                radius,
                start_angle,
                turns,
            } => center + Complex64::from_polar(*radius, start_angle + TAU * turns * t),
            PathPiece::Polyline(pts) => {
                let segs = pts.len() - 1;
                let x = t * segs as f64;
                let k = (x.floor() as usize).min(segs - 1);
                let s = x - k as f64;
                pts[k] + (pts[k + 1] - pts[k]) * s
            }
            PathPiece::Ray { t0, t1, direction } => direction * (t0 + (t1 - t0) * t),
            PathPiece::Arrow { lambda, z } => (lambda * t).exp() * z,
        }
    }

    fn speed_bound(&self) -> f64 {
        match self {
            PathPiece::Circle { radius, turns, .. } => TAU * turns.abs() * radius,
            PathPiece::Polyline(pts) => {
                let segs = (pts.len() - 1) as f64;
                pts.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max) * segs
            }
            PathPiece::Ray { t0, t1, direction } => (t1 - t0).abs() * direction.norm(),
            PathPiece::Arrow { lambda, z } => lambda.norm() * z.norm() * lambda.re.exp().max(1.0),
        }
    }

    /// Parameter values that must be hit exactly (polyline corners).
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            PathPiece::Polyline(pts) => {
                let segs = pts.len() - 1;
                (0..=segs).map(|k| k as f64 / segs as f64).collect()
            }
            _ => vec![0.0, 1.0],
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            PathPiece::Circle {
                center,
                radius,
                start_angle,
                turns,
            } => center.is_finite() && radius.is_finite() && *radius > 0.0 && start_angle.is_finite() && turns.is_finite(),
            PathPiece::Polyline(pts) => pts.len() >= 2 && pts.iter().all(|p| p.is_finite()),
            PathPiece::Ray { t0, t1, direction } => t0.is_finite() && t1.is_finite() && direction.is_finite(),
            PathPiece::Arrow { lambda, z } => lambda.is_finite() && z.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("malformed path piece {self:?}")))
        }
    }
}

impl Segment {
    pub(crate) fn point(&self, t: f64) -> Complex64 {
        self.piece.point(if self.reversed { 1.0 - t } else { t })
    }

    pub(crate) fn speed_bound(&self) -> f64 {
        self.piece.speed_bound()
    }

    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.piece.breakpoints();
        if self.reversed {
            b = b.into_iter().map(|t| 1.0 - t).rev().collect();
        }
        b
    }
}

impl PathSpec {
    pub fn new(pieces: Vec<PathPiece>) -> Self {
        PathSpec {
            pieces,
            orientation: Orientation::Forward,
        }
    }

    pub fn single(piece: PathPiece) -> Self {
        Self::new(vec![piece])
    }

    pub fn reversed(&self) -> Self {
        PathSpec {
            pieces: self.pieces.clone(),
            orientation: match self.orientation {
                Orientation::Forward => Orientation::Reverse,
                Orientation::Reverse => Orientation::Forward,
            },
        }
    }

    /// Counterclockwise unit circle based at 1.
    pub fn unit_circle() -> Self {
        Self::single(PathPiece::Circle {
            center: Complex64::new(0.0, 0.0),
            radius: 1.0,
            start_angle: 0.0,
            turns: 1.0,
        })
    }

    /// Radial segment from 1 to `|z0|`, then the arc to `z0` at its
    /// principal argument.
    pub fn standard(z0: Complex64) -> Self {
        let r = z0.norm();
        let theta = principal_arg(z0);
        let mut pieces = Vec::new();
        if (r - 1.0).abs() > 0.0 {
            pieces.push(PathPiece::Ray {
                t0: 1.0,
                t1: r,
                direction: Complex64::new(1.0, 0.0),
            });
        }
        if theta != 0.0 {
            pieces.push(PathPiece::Circle {
                center: Complex64::new(0.0, 0.0),
                radius: r,
                start_angle: 0.0,
                turns: theta / TAU,
            });
        }
        Self::new(pieces)
    }

    pub(crate) fn segments(&self) -> Result<Vec<Segment>> {
        for p in &self.pieces {
            p.validate()?;
        }
        let forward = self.orientation == Orientation::Forward;
        let mut out: Vec<Segment> = self
            .pieces
            .iter()
            .map(|p| Segment {
                piece: p.clone(),
                reversed: !forward,
            })
            .collect();
        if !forward {
            out.reverse();
        }
        Ok(out)
    }

    pub fn start(&self) -> Option<Complex64> {
        let segs = self.segments().ok()?;
        segs.first().map(|s| s.point(0.0))
    }

    pub fn end(&self) -> Option<Complex64> {
        let segs = self.segments().ok()?;
        segs.last().map(|s| s.point(1.0))
    }
}

/// Principal argument in `(-pi, pi]`.
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        a + TAU
    } else {
        a
    }
}
