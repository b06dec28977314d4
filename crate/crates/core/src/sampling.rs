//! Random canonical points, used by property checks and the verify command.

use rand::Rng;

use crate::cantor::{Point, Space, Tail};

/// A uniformly drawn point with at most `max_left` and `max_right` stored
/// digits; the tail is drawn too unless given.
pub fn random_point<R: Rng + ?Sized>(
    space: &Space,
    rng: &mut R,
    max_left: usize,
    max_right: usize,
    tail: Option<Tail>,
) -> Point {
    let left_len = rng.gen_range(0..=max_left);
    let right_len = rng.gen_range(0..=max_right);
    let left = (1..=left_len)
        .map(|k| rng.gen_range(1..=space.s().term(k)))
        .collect();
    let right = (1..=right_len)
        .map(|k| rng.gen_range(1..=space.r().term(k)))
        .collect();
    let tail = tail.unwrap_or_else(|| {
        if rng.gen_bool(0.5) {
            Tail::Ones
        } else {
            Tail::Max
        }
    });
    space
        .point(left, right, tail)
        .expect("digits drawn within bounds")
}

/// A point with a maximal right tail.
pub fn random_gap_point<R: Rng + ?Sized>(space: &Space, rng: &mut R, max_len: usize) -> Point {
    random_point(space, rng, max_len, max_len, Some(Tail::Max))
}

/// `count` pairwise tail-equivalent points sharing a random tail.
pub fn random_tail_class<R: Rng + ?Sized>(
    space: &Space,
    rng: &mut R,
    max_len: usize,
    count: usize,
) -> Vec<Point> {
    let tail = if rng.gen_bool(0.5) {
        Tail::Ones
    } else {
        Tail::Max
    };
    (0..count)
        .map(|_| random_point(space, rng, max_len, max_len, Some(tail)))
        .collect()
}
