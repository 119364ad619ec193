//! Candidate routes: Yen's k shortest loopless paths by fiber length.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use crate::topology::{Length, LinkId, NodeId, Topology};

/// A simple directed path.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub links: Vec<LinkId>,
    pub nodes: Vec<NodeId>,
    pub length: Length,
}

impl Path {
    fn from_links(t: &Topology, source: NodeId, links: Vec<LinkId>) -> Path {
        let mut nodes = vec![source];
        nodes.extend(links.iter().map(|&l| t.link(l).head));
        let length = links.iter().map(|&l| t.link(l).length).sum();
        Path { links, nodes, length }
    }

    fn key(&self) -> (u64, Vec<NodeId>) {
        (self.length.tenths(), self.nodes.clone())
    }
}

/// Dijkstra avoiding `banned_nodes` (as intermediate or end points) and
/// `banned_links`.
fn shortest(
    t: &Topology,
    source: NodeId,
    target: NodeId,
    banned_nodes: &[bool],
    banned_links: &BTreeSet<LinkId>,
) -> Option<Vec<LinkId>> {
    let n = t.node_count() as usize + 1;
    let mut dist = vec![u64::MAX; n];
    let mut pred: Vec<Option<LinkId>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0;
    heap.push(Reverse((0u64, source)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u as usize] {
            continue;
        }
        if u == target {
            break;
        }
        for &lid in t.neighbors_out(u).expect("node in topology") {
            if banned_links.contains(&lid) {
                continue;
            }
            let l = t.link(lid);
            if banned_nodes[l.head as usize] {
                continue;
            }
            let nd = d + l.length.tenths();
            if nd < dist[l.head as usize] {
                dist[l.head as usize] = nd;
                pred[l.head as usize] = Some(lid);
                heap.push(Reverse((nd, l.head)));
            }
        }
    }
    if dist[target as usize] == u64::MAX {
        return None;
    }
    let mut links = Vec::new();
    let mut at = target;
    while at != source {
        let lid = pred[at as usize]?;
        links.push(lid);
        at = t.link(lid).tail;
    }
    links.reverse();
    Some(links)
}

/// Up to `k` loopless paths from `source` to `target`, ascending by length
/// with ties broken by node sequence. Empty when unreachable or `k == 0`.
pub fn k_shortest_paths(t: &Topology, source: NodeId, target: NodeId, k: usize) -> Vec<Path> {
    if k == 0 || source == target || !t.contains(source) || !t.contains(target) {
        return Vec::new();
    }
    let n = t.node_count() as usize + 1;
    let Some(first) = shortest(t, source, target, &vec![false; n], &BTreeSet::new()) else {
        return Vec::new();
    };
    let mut accepted = vec![Path::from_links(t, source, first)];
    let mut seen: BTreeSet<Vec<NodeId>> = BTreeSet::new();
    seen.insert(accepted[0].nodes.clone());
    let mut pending: BTreeSet<(u64, Vec<NodeId>, Vec<LinkId>)> = BTreeSet::new();

    // Keep going past k while candidates tie with the k-th length so the
    // final order does not depend on which tied path Dijkstra found first.
    loop {
        let last = accepted.last().expect("nonempty").clone();
        for i in 0..last.links.len() {
            let spur = last.nodes[i];
            let root = &last.nodes[..=i];
            let mut banned_links = BTreeSet::new();
            for p in &accepted {
                if p.nodes.len() > i + 1 && &p.nodes[..=i] == root {
                    banned_links.insert(p.links[i]);
                }
            }
            let mut banned_nodes = vec![false; n];
            for &v in &root[..i] {
                banned_nodes[v as usize] = true;
            }
            if let Some(spur_links) = shortest(t, spur, target, &banned_nodes, &banned_links) {
                let mut links = last.links[..i].to_vec();
                links.extend(spur_links);
                let p = Path::from_links(t, source, links);
                if !seen.contains(&p.nodes) {
                    let (len, nodes) = p.key();
                    pending.insert((len, nodes, p.links));
                }
            }
        }
        let Some(next) = pending.pop_first() else { break };
        if accepted.len() >= k && next.0 > accepted[k - 1].length.tenths() {
            break;
        }
        seen.insert(next.1.clone());
        accepted.push(Path::from_links(t, source, next.2));
    }
    accepted.sort_by_key(Path::key);
    accepted.truncate(k);
    accepted
}

/// Every simple path from `source` to `target`, sorted like
/// [`k_shortest_paths`]. Exponential; for validation on small graphs.
pub fn all_simple_paths(t: &Topology, source: NodeId, target: NodeId) -> Vec<Path> {
    fn walk(
        t: &Topology,
        at: NodeId,
        target: NodeId,
        on_path: &mut Vec<bool>,
        links: &mut Vec<LinkId>,
        out: &mut Vec<Vec<LinkId>>,
    ) {
        if at == target {
            out.push(links.clone());
            return;
        }
        for &lid in t.neighbors_out(at).expect("node in topology") {
            let h = t.link(lid).head;
            if on_path[h as usize] {
                continue;
            }
            on_path[h as usize] = true;
            links.push(lid);
            walk(t, h, target, on_path, links, out);
            links.pop();
            on_path[h as usize] = false;
        }
    }
    if source == target || !t.contains(source) || !t.contains(target) {
        return Vec::new();
    }
    let mut on_path = vec![false; t.node_count() as usize + 1];
    on_path[source as usize] = true;
    let mut raw = Vec::new();
    walk(t, source, target, &mut on_path, &mut Vec::new(), &mut raw);
    let mut paths: Vec<Path> = raw.into_iter().map(|l| Path::from_links(t, source, l)).collect();
    paths.sort_by_key(Path::key);
    paths
}
