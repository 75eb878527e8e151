//! Densest-ball search used to propose a statistical limit.

use std::cmp::Ordering;

use crate::numeric::Scalar;
use crate::point::Point;

#[derive(Clone, Debug)]
pub(crate) struct Cluster<T> {
    pub size: usize,
    pub total: usize,
    pub centroid: Point<T>,
}

/// Finds a max-norm ball of the given radius holding as many points as
/// possible. Coordinates are processed in order: sort by coordinate `j`, keep
/// the densest slab of width `2·radius` (ties: narrower slab, then lower
/// coordinate), then recurse on the next coordinate within it. Exact for
/// `d = 1`.
pub(crate) fn densest_cluster<T: Scalar>(points: &[Point<T>], radius: &T) -> Option<Cluster<T>> {
    let first = points.first()?;
    let dim = first.dim();
    let width = radius.clone() + radius.clone();
    let mut members: Vec<&Point<T>> = points.iter().collect();
    for j in 0..dim {
        members.sort_unstable_by(|a, b| a.coord(j).partial_cmp(b.coord(j)).unwrap_or(Ordering::Equal));
        let mut best = (0usize, 0usize); // (start, end) inclusive
        let mut best_spread: Option<T> = None;
        let mut hi = 0usize;
        for lo in 0..members.len() {
            hi = hi.max(lo);
            let base = members[lo].coord(j).clone();
            while hi + 1 < members.len() && members[hi + 1].coord(j).clone() - base.clone() <= width {
                hi += 1;
            }
            let count = hi - lo + 1;
            let best_count = best.1 - best.0 + 1;
            let spread = members[hi].coord(j).clone() - base;
            let better = match &best_spread {
                None => true,
                Some(s) => count > best_count || (count == best_count && spread < *s),
            };
            if better {
                best = (lo, hi);
                best_spread = Some(spread);
            }
            if hi + 1 == members.len() && members.len() - lo < best_count {
                break;
            }
        }
        members = members[best.0..=best.1].to_vec();
    }
    let mut sum = Point::zero(dim);
    for p in &members {
        sum.add_assign(p);
    }
    let n = T::from_i64(members.len() as i64);
    Some(Cluster {
        size: members.len(),
        total: points.len(),
        centroid: sum.map(|c| c.clone() / n.clone()),
    })
}
