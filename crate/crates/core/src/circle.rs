//! Angles on the unit circle and closed arc sets.
//!
//! Every winning or reachability region of the game is a subset of S¹ (the
//! Turret's pointing angle), so all region algebra goes through [`ArcSet`].
//! Internally a set is stored as sorted, disjoint closed intervals of the
//! unrolled range `[0, 2π]`; an arc crossing angle zero is kept as the two
//! pieces `[a, 2π]` and `[0, b]` and merged again by [`ArcSet::arcs`].

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Map any real to `(-π, π]`.
pub fn canonical<T: Scalar>(x: T) -> T {
    let y = wrap_positive(x);
    if y > T::PI() {
        y - T::two_pi()
    } else {
        y
    }
}

/// Map any real to `[0, 2π)`.
pub fn wrap_positive<T: Scalar>(x: T) -> T {
    let tau = T::two_pi();
    let y = x % tau;
    let y = if y < T::zero() { y + tau } else { y };
    // `y + tau` can round up to exactly tau for tiny negative inputs
    if y >= tau {
        T::zero()
    } else {
        y
    }
}

/// Signed rotation from `b` to `a`, in `(-π, π]`.
pub fn signed_diff<T: Scalar>(a: T, b: T) -> T {
    canonical(a - b)
}

/// Nonnegative rotation needed to go from `from` to `to` turning counterclockwise.
pub fn ccw_distance<T: Scalar>(from: T, to: T) -> T {
    wrap_positive(to - from)
}

/// Nonnegative rotation needed to go from `from` to `to` turning clockwise.
pub fn cw_distance<T: Scalar>(from: T, to: T) -> T {
    wrap_positive(from - to)
}

/// An angle kept in canonical form `(-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle<T: Scalar>(T);

impl<T: Scalar> Angle<T> {
    pub fn new(radians: T) -> Self {
        Angle(canonical(radians))
    }

    pub fn value(self) -> T {
        self.0
    }

    pub fn rotated(self, delta: T) -> Self {
        Angle::new(self.0 + delta)
    }

    /// `self - other`, wrapped to `(-π, π]`.
    pub fn signed_diff(self, other: Angle<T>) -> T {
        signed_diff(self.0, other.0)
    }
}

impl<T: Scalar> From<T> for Angle<T> {
    fn from(x: T) -> Self {
        Angle::new(x)
    }
}

/// Rotational sense on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Cw,
    Ccw,
}

impl Direction {
    /// `+1` for counterclockwise, `-1` for clockwise.
    pub fn sign<T: Scalar>(self) -> T {
        match self {
            Direction::Ccw => T::one(),
            Direction::Cw => -T::one(),
        }
    }

    pub fn from_sign<T: Scalar>(s: T) -> Self {
        if s < T::zero() {
            Direction::Cw
        } else {
            Direction::Ccw
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Cw => Direction::Ccw,
            Direction::Ccw => Direction::Cw,
        }
    }

    /// Rotation needed from `from` to `to` in this direction.
    pub fn distance<T: Scalar>(self, from: T, to: T) -> T {
        match self {
            Direction::Ccw => ccw_distance(from, to),
            Direction::Cw => cw_distance(from, to),
        }
    }
}

/// Closed arc `{θ : |signed_diff(θ, center)| ≤ half_width}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc<T: Scalar> {
    pub center: T,
    pub half_width: T,
}

impl<T: Scalar> Arc<T> {
    /// Negative widths collapse to a point; widths of π or more are the full circle.
    pub fn new(center: T, half_width: T) -> Self {
        Arc {
            center: canonical(center),
            half_width: half_width.max(T::zero()).min(T::PI()),
        }
    }

    pub fn is_full(&self) -> bool {
        self.half_width >= T::PI()
    }

    pub fn contains(&self, theta: T) -> bool {
        self.is_full() || signed_diff(theta, self.center).abs() <= self.half_width
    }

    /// Clockwise end of the arc.
    pub fn lower(&self) -> T {
        canonical(self.center - self.half_width)
    }

    /// Counterclockwise end of the arc.
    pub fn upper(&self) -> T {
        canonical(self.center + self.half_width)
    }
}

/// Finite union of closed arcs in normalized form.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ArcSet<T: Scalar> {
    /// Sorted, disjoint, non-touching closed intervals inside `[0, 2π]`.
    ivals: Vec<(T, T)>,
}

impl<T: Scalar> ArcSet<T> {
    pub fn empty() -> Self {
        ArcSet { ivals: Vec::new() }
    }

    pub fn full() -> Self {
        ArcSet {
            ivals: vec![(T::zero(), T::two_pi())],
        }
    }

    pub fn from_arc(arc: Arc<T>) -> Self {
        if arc.is_full() {
            return Self::full();
        }
        let tau = T::two_pi();
        let start = wrap_positive(arc.center - arc.half_width);
        let end = start + T::two() * arc.half_width;
        let ivals = if end <= tau {
            vec![(start, end)]
        } else {
            vec![(T::zero(), end - tau), (start, tau)]
        };
        Self::normalized(ivals)
    }

    /// Arc running counterclockwise from `from` through `extent` radians.
    pub fn from_ccw(from: T, extent: T) -> Self {
        let half = T::half() * extent.max(T::zero());
        Self::from_arc(Arc::new(from + half, half))
    }

    pub fn from_arcs<I: IntoIterator<Item = Arc<T>>>(arcs: I) -> Self {
        arcs.into_iter()
            .fold(Self::empty(), |acc, a| acc.union(&Self::from_arc(a)))
    }

    fn normalized(mut ivals: Vec<(T, T)>) -> Self {
        ivals.retain(|(a, b)| a <= b);
        ivals.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite interval ends"));
        let mut out: Vec<(T, T)> = Vec::with_capacity(ivals.len());
        for (a, b) in ivals {
            match out.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => out.push((a, b)),
            }
        }
        ArcSet { ivals: out }
    }

    pub fn is_empty(&self) -> bool {
        self.ivals.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.ivals.len() == 1 && self.ivals[0].0 <= T::zero() && self.ivals[0].1 >= T::two_pi()
    }

    pub fn contains(&self, theta: T) -> bool {
        let m = wrap_positive(theta);
        let tau = T::two_pi();
        self.ivals
            .iter()
            .any(|&(a, b)| (a <= m && m <= b) || (m == T::zero() && b >= tau))
    }

    /// Total angular measure, in `[0, 2π]`.
    pub fn measure(&self) -> T {
        self.ivals
            .iter()
            .fold(T::zero(), |acc, &(a, b)| acc + (b - a))
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut all = self.ivals.clone();
        all.extend_from_slice(&other.ivals);
        Self::normalized(all)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.ivals.len() && j < other.ivals.len() {
            let (a0, a1) = self.ivals[i];
            let (b0, b1) = other.ivals[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        // two sets that only meet at the 0 ≡ 2π seam
        let seam = T::zero();
        let has_seam = out
            .iter()
            .any(|&(a, b)| a <= seam || b >= T::two_pi());
        if !has_seam && self.contains(seam) && other.contains(seam) {
            out.push((seam, seam));
        }
        Self::normalized(out)
    }

    /// Closure of the complement.
    pub fn complement(&self) -> Self {
        let tau = T::two_pi();
        let mut out = Vec::new();
        let mut cursor = T::zero();
        for &(a, b) in &self.ivals {
            if a > cursor {
                out.push((cursor, a));
            }
            cursor = cursor.max(b);
        }
        if cursor < tau {
            out.push((cursor, tau));
        }
        Self::normalized(out)
    }

    /// `self` minus the interior of `other`.
    pub fn difference(&self, other: &Self) -> Self {
        self.intersect(&other.complement())
    }

    /// The connected components as arcs, merged across the zero seam.
    pub fn arcs(&self) -> Vec<Arc<T>> {
        let tau = T::two_pi();
        if self.is_full() {
            return vec![Arc::new(T::zero(), T::PI())];
        }
        let mut pieces = self.ivals.clone();
        let wraps = pieces.len() >= 2
            && pieces[0].0 <= T::zero()
            && pieces[pieces.len() - 1].1 >= tau;
        if wraps {
            let first = pieces.remove(0);
            let last = pieces.last_mut().expect("len >= 2");
            last.1 = tau + first.1;
        }
        pieces
            .into_iter()
            .map(|(a, b)| Arc::new(T::half() * (a + b), T::half() * (b - a)))
            .collect()
    }

    /// Number of connected components.
    pub fn component_count(&self) -> usize {
        self.arcs().len()
    }

    /// Nearest boundary point reached by rotating from `theta` in `dir`.
    ///
    /// Returns `None` for the empty set and for the full circle, which has no
    /// boundary.
    pub fn nearest_boundary(&self, theta: T, dir: Direction) -> Option<(T, T)> {
        if self.is_empty() || self.is_full() {
            return None;
        }
        self.arcs()
            .into_iter()
            .flat_map(|arc| [arc.lower(), arc.upper()])
            .map(|p| (dir.distance(theta, p), p))
            .min_by(|x, y| x.0.partial_cmp(&y.0).expect("finite distance"))
    }

    /// Smallest rotation in `dir` that reaches a boundary point of the set.
    ///
    /// An empty set (or the boundaryless full circle) yields `+∞`.
    pub fn boundary_distance(&self, theta: T, dir: Direction) -> T {
        self.nearest_boundary(theta, dir)
            .map(|(d, _)| d)
            .unwrap_or_else(T::infinity)
    }
}
