use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Weight;

pub const BRUTE_FORCE_MAX_N: usize = 26;

/// Optimum and number of optimal independent sets, by scanning all `2ⁿ`
/// assignments. Float weights count as tied within `1e-9` relative.
pub fn brute_force<W: Weight>(g: &Graph<W>) -> Result<(W, u64)> {
    let n = g.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u))
        .collect();
    let independent_weight = |mask: u32| -> Option<W> {
        let mut bits = mask;
        let mut w = W::zero();
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if adj[v] & mask != 0 {
                return None;
            }
            w += g.weight(v);
        }
        Some(w)
    };
    let full = 1u32 << n;
    let best = (0..full)
        .filter_map(independent_weight)
        .fold(W::zero(), |a, b| a.max_of(b));
    let tol = 1e-9 * best.as_f64().abs().max(1.0);
    let count = (0..full)
        .filter_map(independent_weight)
        .filter(|w| (best - *w).as_f64() <= tol)
        .count() as u64;
    Ok((best, count))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let c5 = Graph::<f64>::build(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)], None).unwrap();
        assert_eq!(brute_force(&c5).unwrap(), (2.0, 5));
        let k3 = Graph::<f64>::build(3, &[(0, 1), (1, 2), (0, 2)], None).unwrap();
        assert_eq!(brute_force(&k3).unwrap(), (1.0, 3));
        let p3 = Graph::<f64>::build(3, &[(0, 1), (1, 2)], None).unwrap();
        assert_eq!(brute_force(&p3).unwrap(), (2.0, 1));
        assert!(brute_force(&Graph::<f64>::empty(27)).is_err());
        assert_eq!(brute_force(&Graph::<f64>::empty(0)).unwrap(), (0.0, 1));
    }
}
