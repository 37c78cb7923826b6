//! Fixed-weight message enumeration with incremental XOR.
//!
//! Messages of weight `w` are visited in colexicographic order of their
//! support. The visitor gets the packed message and the XOR of the selected
//! table rows, and returns `false` to stop the walk.

/// Integer bit of message position `i` (position 0 is the most significant).
#[inline(always)]
pub(crate) fn message_bit(k: usize, i: usize) -> u64 {
    1u64 << (k - 1 - i)
}

macro_rules! define_walk {
    ($name:ident $(, #[$attr:meta])*) => {
        $(#[$attr])*
        #[allow(clippy::too_many_arguments)]
        unsafe fn $name<F: FnMut(u64, u64) -> bool>(
            rows: &[u64],
            k: usize,
            r: usize,
            upper: usize,
            mask: u64,
            acc: u64,
            visit: &mut F,
        ) -> bool {
            if r == 1 {
                for i in 0..upper {
                    if !visit(mask | message_bit(k, i), acc ^ rows[i]) {
                        return false;
                    }
                }
                return true;
            }
            for top in (r - 1)..upper {
                if !$name(rows, k, r - 1, top, mask | message_bit(k, top), acc ^ rows[top], visit) {
                    return false;
                }
            }
            true
        }
    };
}

define_walk!(walk_plain);
#[cfg(all(feature = "std", target_arch = "x86_64"))]
define_walk!(walk_popcnt, #[target_feature(enable = "popcnt")]);

#[inline]
fn walk<F: FnMut(u64, u64) -> bool>(rows: &[u64], k: usize, r: usize, upper: usize, mask: u64, acc: u64, visit: &mut F) -> bool {
    #[cfg(all(feature = "std", target_arch = "x86_64"))]
    if std::is_x86_feature_detected!("popcnt") {
        // SAFETY: the CPU supports the enabled target feature.
        return unsafe { walk_popcnt(rows, k, r, upper, mask, acc, visit) };
    }
    // SAFETY: no target features are enabled on this variant.
    unsafe { walk_plain(rows, k, r, upper, mask, acc, visit) }
}

/// Visits every weight-`w` message whose largest support index is `top`.
/// For `w == 0` only the zero message is visited, and only for `top == 0`.
pub(crate) fn for_each_with_top<F: FnMut(u64, u64) -> bool>(rows: &[u64], w: usize, top: usize, visit: &mut F) -> bool {
    let k = rows.len();
    match w {
        0 => top != 0 || visit(0, 0),
        1 => visit(message_bit(k, top), rows[top]),
        _ => walk(rows, k, w - 1, top, message_bit(k, top), rows[top], visit),
    }
}

/// Range of `top` values that partitions the weight-`w` messages.
pub(crate) fn top_range(k: usize, w: usize) -> core::ops::Range<usize> {
    match w {
        0 => 0..1,
        _ if w > k => 0..0,
        _ => (w - 1)..k,
    }
}

/// Visits every weight-`w` message.
#[cfg(test)]
pub(crate) fn for_each<F: FnMut(u64, u64) -> bool>(rows: &[u64], w: usize, visit: &mut F) -> bool {
    top_range(rows.len(), w).all(|top| for_each_with_top(rows, w, top, visit))
}

/// Folds a per-worker state over every weight-`w` message.
///
/// With the `parallel` feature the `top` partition is spread over rayon
/// workers and the states are combined with `merge`, which must be
/// associative and commutative for the result to be deterministic.
pub(crate) fn scan<S, I, V, M>(rows: &[u64], w: usize, init: I, visit: V, merge: M) -> S
where
    S: Send,
    I: Fn() -> S + Sync,
    V: Fn(&mut S, u64, u64) -> bool + Sync,
    M: Fn(S, S) -> S + Sync,
{
    let range = top_range(rows.len(), w);
    #[cfg(feature = "parallel")]
    if w >= 3 {
        use rayon::prelude::*;
        return range
            .into_par_iter()
            .map(|top| {
                let mut state = init();
                for_each_with_top(rows, w, top, &mut |m, a| visit(&mut state, m, a));
                state
            })
            .reduce(&init, &merge);
    }
    let _ = &merge;
    let mut state = init();
    for top in range {
        if !for_each_with_top(rows, w, top, &mut |m, a| visit(&mut state, m, a)) {
            break;
        }
    }
    state
}

/// `C(n, r)` saturating at `u128::MAX`.
pub(crate) fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}
