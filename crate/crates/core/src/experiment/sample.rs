use num_traits::Zero;
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::demand::ChainRequest;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::topology::{Length, Link, NodeId, Topology};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` requests with distinct ordered endpoint pairs, each with a
/// uniform rate distribution whose maximum is uniform in `k_min..=k_max`.
/// Request ids are `1..=count`.
pub fn sample_requests(t: &Topology, count: usize, k_min: u32, k_max: u32, seed: u64) -> Result<Vec<ChainRequest>> {
    let pairs: Vec<(NodeId, NodeId)> = t
        .nodes()
        .flat_map(|s| t.nodes().filter(move |&d| d != s).map(move |d| (s, d)))
        .collect();
    if count > pairs.len() {
        return Err(Error::Config(format!(
            "{count} requests exceed the {} ordered node pairs",
            pairs.len()
        )));
    }
    let mut rng = rng(seed);
    let picked = index::sample(&mut rng, pairs.len(), count).into_vec();
    picked
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let (s, d) = pairs[p];
            let k = rng.gen_range(k_min..=k_max);
            ChainRequest::uniform(i as u32 + 1, s, d, k)
        })
        .collect()
}

/// A random instance within the oracle's size guard: 3 to 5 nodes, at most
/// 12 directed links, one or two requests with maximum rate at most 2 and
/// random (not necessarily uniform) rate distributions. Capacities are small
/// so that sharing a link often binds.
pub fn tiny_instance<R: Rng>(rng: &mut R) -> (Topology, Vec<ChainRequest>) {
    let n: u32 = rng.gen_range(3..=5);
    let mut pairs: Vec<(NodeId, NodeId)> = (1..=n)
        .flat_map(|a| (1..=n).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    pairs.shuffle(rng);
    let m = rng.gen_range(n as usize..=pairs.len().min(12));
    let links: Vec<Link> = pairs[..m]
        .iter()
        .map(|&(a, b)| {
            let km = 10 * rng.gen_range(2..=40u64);
            Link::new(a, b, Length::from_km(km), rng.gen_range(0..=9), rng.gen_range(0..=3))
        })
        .collect();
    let t = Topology::new(n, links).expect("generated topology is valid");
    let count = rng.gen_range(1..=2);
    let requests = (0..count)
        .map(|i| {
            let s = rng.gen_range(1..=n);
            let d = loop {
                let d = rng.gen_range(1..=n);
                if d != s {
                    break d;
                }
            };
            let k: usize = rng.gen_range(0..=2);
            let weights: Vec<i128> = (0..=k).map(|_| rng.gen_range(0..=3)).collect();
            let total: i128 = weights.iter().sum();
            let probs: Vec<Rational> = if total.is_zero() {
                vec![Rational::new(1, k as i128 + 1); k + 1]
            } else {
                weights.iter().map(|&w| Rational::new(w, total)).collect()
            };
            ChainRequest::new(i + 1, s, d, probs).expect("valid distribution")
        })
        .collect();
    (t, requests)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_seeded() {
        let t = Topology::usnet();
        let a = sample_requests(&t, 10, 1, 4, 42).unwrap();
        let b = sample_requests(&t, 10, 1, 4, 42).unwrap();
        assert_eq!(a, b);
        let pairs: std::collections::BTreeSet<_> = a.iter().map(|r| (r.source, r.destination)).collect();
        assert_eq!(pairs.len(), 10);
        assert!(a.iter().all(|r| (1..=4).contains(&r.max_rate())));
    }

    #[test]
    fn too_many_requests() {
        let t = Topology::new(2, vec![]).unwrap();
        assert!(sample_requests(&t, 3, 0, 0, 1).is_err());
    }

    #[test]
    fn tiny_instances_respect_guard() {
        let mut r = rng(9);
        for _ in 0..200 {
            let (t, req) = tiny_instance(&mut r);
            assert!(t.node_count() <= 5 && t.links().len() <= 12);
            assert!(req.len() <= 2 && req.iter().all(|q| q.max_rate() <= 2));
        }
    }
}
