//! Exact MWIS branch-and-bound with deterministic tick accounting.
//!
//! Search node:
//! 1. reductions: a candidate with no candidate neighbors is taken; a
//!    candidate whose only candidate neighbor is not heavier is taken and
//!    the neighbor dropped;
//! 2. bound: the candidates are covered by cliques (vertex by vertex, first
//!    clique that fits, with a one-swap repair) and each clique contributes
//!    its heaviest vertex; cliques past the incumbent's reach are thinned
//!    by unit propagation over the others; the node is cut when
//!    `current + bound` does not beat the incumbent;
//! 3. if the candidates split into several components, each is solved
//!    exactly on its own against the threshold it must beat;
//! 4. otherwise branch on the candidate of maximum weighted degree (sum of
//!    candidate-neighbor weights; ties by lowest index), include-branch
//!    first.
//!
//! Ticks: one per node expansion, one per bound evaluation, one per
//! candidate-set update (each child set built and each vertex fixed by a
//! reduction). The count depends only on the graph and the configuration.

use crate::bitset::Bitset;
use crate::graph::Graph;
use crate::scalar::Weight;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub ticks: u64,
    pub nodes: u64,
    pub exhausted: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult<W> {
    pub value: W,
    pub solution: Vec<usize>,
    pub stats: SearchStats,
}

struct Local<W> {
    best: W,
    best_set: Option<Vec<usize>>,
}

/// Unit propagation over a fixed clique cover. A vertex's clique is
/// `class[x]` and its slot there `slot[x]`; `live[c]` holds the slots of
/// clique `c` not yet excluded.
#[derive(Default)]
struct Propagator {
    in_cover: Bitset,
    class: Vec<usize>,
    slot: Vec<usize>,
    retired: Vec<bool>,
    live: Vec<u64>,
    forced: Vec<bool>,
    /// Clique whose forced vertex excluded `x` (`usize::MAX` for the tested
    /// vertex), valid when `stamp[x] == epoch`.
    cause: Vec<usize>,
    stamp: Vec<u32>,
    epoch: u32,
    queue: Vec<(usize, usize)>,
    seen: Vec<bool>,
}

const TESTED: usize = usize::MAX;

impl Propagator {
    fn load(&mut self, classes: &[Vec<usize>], n: usize) {
        if self.class.len() != n {
            self.in_cover = Bitset::new(n);
            self.class = vec![0; n];
            self.slot = vec![0; n];
            self.cause = vec![0; n];
            self.stamp = vec![0; n];
            self.epoch = 0;
        }
        self.in_cover.clear();
        self.retired.clear();
        for (c, members) in classes.iter().enumerate() {
            // cliques too large for a slot mask never take part
            self.retired.push(members.len() > 64);
            for (i, &x) in members.iter().enumerate() {
                self.in_cover.insert(x);
                self.class[x] = c;
                self.slot[x] = i;
            }
        }
        self.live.resize(classes.len(), 0);
        self.forced.resize(classes.len(), false);
        self.seen.resize(classes.len(), false);
    }

    /// Forces `v` and propagates; returns the cliques of the conflict found
    /// and whether `v` takes part in it.
    fn conflict(&mut self, masks: &[Bitset], classes: &[Vec<usize>], v: usize) -> Option<(Vec<usize>, bool)> {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        for (c, members) in classes.iter().enumerate() {
            self.live[c] = if members.len() >= 64 { u64::MAX } else { (1u64 << members.len()) - 1 };
            self.forced[c] = false;
        }
        self.queue.clear();
        self.queue.push((v, TESTED));
        for (c, members) in classes.iter().enumerate() {
            if members.len() == 1 && !self.retired[c] {
                self.forced[c] = true;
                self.queue.push((members[0], c));
            }
        }
        let mut head = 0;
        let mut empty = None;
        'prop: while head < self.queue.len() {
            let (u, from) = self.queue[head];
            head += 1;
            let m = masks[u].words();
            for (wi, (&a, &b)) in m.iter().zip(self.in_cover.words()).enumerate() {
                let mut bits = a & b;
                while bits != 0 {
                    let x = wi * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let c = self.class[x];
                    let bit = 1u64 << self.slot[x];
                    if self.retired[c] || self.live[c] & bit == 0 {
                        continue;
                    }
                    self.live[c] &= !bit;
                    self.cause[x] = from;
                    self.stamp[x] = self.epoch;
                    match self.live[c].count_ones() {
                        0 => {
                            empty = Some(c);
                            break 'prop;
                        }
                        1 if !self.forced[c] => {
                            self.forced[c] = true;
                            let y = classes[c][self.live[c].trailing_zeros() as usize];
                            self.queue.push((y, c));
                        }
                        _ => {}
                    }
                }
            }
        }
        let c0 = empty?;
        // the conflict: the empty clique and, transitively, the cliques
        // whose forced vertices excluded members of cliques already in it
        let mut group = vec![c0];
        let mut with_v = false;
        self.seen.iter_mut().for_each(|s| *s = false);
        self.seen[c0] = true;
        let mut i = 0;
        while i < group.len() {
            for &x in &classes[group[i]] {
                if self.stamp[x] != self.epoch {
                    continue;
                }
                let d = self.cause[x];
                if d == TESTED {
                    with_v = true;
                } else if !self.seen[d] {
                    self.seen[d] = true;
                    group.push(d);
                }
            }
            i += 1;
        }
        Some((group, with_v))
    }
}

struct Search<W> {
    /// Vertices relabeled so that index order is decreasing weight.
    masks: Vec<Bitset>,
    weights: Vec<W>,
    /// Scratch space of the cover: clique lists and each vertex's clique.
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    prop: Propagator,
    cap: Vec<W>,
    /// Scratch space of the degree count.
    ones: Bitset,
    twos: Bitset,
    stats: SearchStats,
    budget: Option<u64>,
}

impl<W: Weight> Search<W> {
    fn new(masks: Vec<Bitset>, weights: Vec<W>, budget: Option<u64>) -> Self {
        let n = masks.len();
        Self {
            masks,
            weights,
            classes: Vec::new(),
            class_of: vec![0; n],
            prop: Propagator::default(),
            cap: Vec::new(),
            ones: Bitset::new(n),
            twos: Bitset::new(n),
            stats: SearchStats::default(),
            budget,
        }
    }

    #[inline]
    fn tick(&mut self, k: u64) {
        self.stats.ticks += k;
        if let Some(b) = self.budget {
            if self.stats.ticks > b {
                self.stats.exhausted = true;
            }
        }
    }

    fn clique_cover_bound(&self, cand: &Bitset) -> W {
        let mut remaining = cand.clone();
        let mut bound = W::zero();
        while let Some(v) = remaining.first() {
            remaining.remove(v);
            bound += self.weights[v];
            let mut grow = remaining.clone();
            grow.intersect_with(&self.masks[v]);
            while let Some(u) = grow.first() {
                remaining.remove(u);
                grow.remove(u);
                grow.intersect_with(&self.masks[u]);
            }
        }
        bound
    }

    fn split_components(&self, cand: &Bitset) -> Vec<Bitset> {
        let mut rest = cand.clone();
        let mut comps = Vec::new();
        let mut frontier = Bitset::new(cand.capacity());
        let mut next = Bitset::new(cand.capacity());
        while let Some(s) = rest.first() {
            let mut comp = Bitset::new(cand.capacity());
            frontier.insert(s);
            while !frontier.is_empty() {
                comp.union_with(&frontier);
                rest.difference_with(&frontier);
                for u in frontier.iter() {
                    next.union_with(&self.masks[u]);
                }
                next.intersect_with(&rest);
                std::mem::swap(&mut frontier, &mut next);
                next.clear();
            }
            comps.push(comp);
        }
        comps
    }

    /// Candidates with at most one candidate neighbor, by bit-parallel
    /// counting of neighbor multiplicities.
    fn low_degree(&mut self, cand: &Bitset) -> Bitset {
        let mut ones = std::mem::take(&mut self.ones);
        let mut twos = std::mem::take(&mut self.twos);
        ones.clear();
        twos.clear();
        for u in cand.iter() {
            let m = self.masks[u].words();
            for ((o, t), &x) in ones.words_mut().iter_mut().zip(twos.words_mut().iter_mut()).zip(m) {
                *t |= *o & x;
                *o |= x;
            }
        }
        let mut low = cand.clone();
        low.difference_with(&twos);
        self.ones = ones;
        self.twos = twos;
        low
    }

    /// Applies reductions in place; returns the weight taken.
    fn reduce(&mut self, cand: &mut Bitset, taken: &mut Vec<usize>) -> W {
        let mut gained = W::zero();
        loop {
            let low = self.low_degree(cand);
            let mut changed = false;
            for v in low.iter() {
                if !cand.contains(v) {
                    continue;
                }
                let take = match self.masks[v].intersection_count(cand) {
                    0 => true,
                    1 => {
                        let u = self.masks[v]
                            .iter()
                            .find(|&u| cand.contains(u))
                            .expect("one neighbor");
                        self.weights[v] >= self.weights[u]
                    }
                    _ => false,
                };
                if take {
                    cand.remove(v);
                    cand.difference_with(&self.masks[v]);
                    gained += self.weights[v];
                    taken.push(v);
                    changed = true;
                    self.tick(1);
                }
            }
            if !changed {
                return gained;
            }
        }
    }

    fn search(&mut self, cand: Bitset, threshold: W, seed: Option<Vec<usize>>) -> Local<W> {
        let mut local = Local {
            best: threshold,
            best_set: seed,
        };
        let mut cur = Vec::new();
        self.branch(cand, W::zero(), &mut cur, &mut local);
        local
    }

    fn record(local: &mut Local<W>, value: W, set: &[usize]) {
        if value > local.best {
            local.best = value;
            local.best_set = Some(set.to_vec());
        }
    }

    fn branch(&mut self, mut cand: Bitset, mut cur: W, set: &mut Vec<usize>, local: &mut Local<W>) {
        if self.stats.exhausted {
            return;
        }
        self.stats.nodes += 1;
        self.tick(1);
        let mark = set.len();
        cur += self.reduce(&mut cand, set);
        self.explore(cand, cur, set, local);
        set.truncate(mark);
    }

    /// Clique cover of `cand` built vertex by vertex in index order (first
    /// clique that fits). A vertex that would open a new clique while the
    /// bound exceeds `need` is first tried by swapping: it replaces its
    /// only non-neighbor `u` in an earlier clique and `u` moves to a later
    /// clique that fits it, if that costs less than a new clique.
    ///
    /// Returns whether every independent set of `cand` weighs at most
    /// `need`.
    fn within(&mut self, cand: &Bitset, need: W) -> bool {
        let mut classes = std::mem::take(&mut self.classes);
        let mut maxima: Vec<W> = Vec::with_capacity(cand.capacity());
        let mut used = 0usize;
        let mut colored = Bitset::new(cand.capacity());
        let mut total = W::zero();
        let fits = |masks: &[Bitset], members: &[usize], v: usize| {
            members.iter().all(|&u| masks[v].contains(u))
        };
        'vertex: for v in cand.iter() {
            let wv = self.weights[v];
            // a clique that fits v holds only neighbors of v
            let mut best_k: Option<usize> = None;
            for (wi, (&m, &c)) in self.masks[v].words().iter().zip(colored.words()).enumerate() {
                let mut bits = m & c;
                while bits != 0 {
                    let u = wi * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let k = self.class_of[u];
                    if best_k.is_none_or(|b| k < b) && fits(&self.masks, &classes[k], v) {
                        best_k = Some(k);
                    }
                }
            }
            if let Some(k) = best_k {
                classes[k].push(v);
                self.class_of[v] = k;
                colored.insert(v);
                if wv > maxima[k] {
                    total += wv - maxima[k];
                    maxima[k] = wv;
                }
                continue 'vertex;
            }
            if total + wv > need {
                for k1 in 0..used {
                    let mut outside = classes[k1].iter().filter(|&&x| !self.masks[v].contains(x));
                    let (Some(&u), None) = (outside.next(), outside.next()) else {
                        continue;
                    };
                    let mut target: Option<usize> = None;
                    for (wi, (&m, &c)) in self.masks[u].words().iter().zip(colored.words()).enumerate() {
                        let mut bits = m & c;
                        while bits != 0 {
                            let x = wi * 64 + bits.trailing_zeros() as usize;
                            bits &= bits - 1;
                            let k = self.class_of[x];
                            if k > k1
                                && target.is_none_or(|t| k < t)
                                && fits(&self.masks, &classes[k], u)
                            {
                                target = Some(k);
                            }
                        }
                    }
                    let Some(k2) = target else { continue };
                    let max1 = classes[k1]
                        .iter()
                        .filter(|&&x| x != u)
                        .map(|&x| self.weights[x])
                        .fold(wv, |m, w| if w > m { w } else { m });
                    let wu = self.weights[u];
                    let max2 = if wu > maxima[k2] { wu } else { maxima[k2] };
                    let delta = max1 + max2 - maxima[k1] - maxima[k2];
                    if delta < wv {
                        total += delta;
                        let slot = classes[k1].iter().position(|&x| x == u).expect("member");
                        classes[k1][slot] = v;
                        classes[k2].push(u);
                        self.class_of[v] = k1;
                        self.class_of[u] = k2;
                        colored.insert(v);
                        maxima[k1] = max1;
                        maxima[k2] = max2;
                        continue 'vertex;
                    }
                }
            }
            if used == classes.len() {
                classes.push(Vec::new());
            }
            classes[used].clear();
            classes[used].push(v);
            self.class_of[v] = used;
            colored.insert(v);
            maxima.push(wv);
            used += 1;
            total += wv;
        }
        let fits = self.propagate_cover(&classes[..used], &maxima, need);
        self.classes = classes;
        fits
    }

    /// Splits the cover into a leading part `A` whose cliques fit under
    /// `need` and the rest `B`, then tries to move every vertex of `B` into
    /// `A` by unit propagation: with `v` forced, cliques of `A` that lose
    /// all but one vertex force that vertex, and a clique left empty proves
    /// that no independent set hits every clique of the conflict. Each
    /// clique of the conflict gives up the smallest capacity among them
    /// (the group is charged that much less), and cliques left without
    /// capacity drop out. `v` joins `A` once the bound of `A` plus its
    /// remaining weight fits under `need`.
    ///
    /// The bound of `A` only grows, so the first vertex that cannot join
    /// settles the answer.
    fn propagate_cover(&mut self, classes: &[Vec<usize>], maxima: &[W], need: W) -> bool {
        let mut total = W::zero();
        let mut k = 0;
        while k < classes.len() && total + maxima[k] <= need {
            total += maxima[k];
            k += 1;
        }
        if k == classes.len() {
            return true;
        }
        if k == 0 {
            return false;
        }
        let mut prop = std::mem::take(&mut self.prop);
        prop.load(&classes[..k], self.masks.len());
        let mut cap = std::mem::take(&mut self.cap);
        cap.clear();
        cap.extend_from_slice(&maxima[..k]);
        let mut fits = true;
        'outer: for members in &classes[k..] {
            for &v in members {
                let mut base = total;
                let mut rest = self.weights[v];
                while base + rest > need {
                    let Some((group, with_v)) = prop.conflict(&self.masks, &classes[..k], v) else {
                        break;
                    };
                    let start = if with_v { rest } else { cap[group[0]] };
                    let least = group.iter().map(|&t| cap[t]).fold(start, |m, w| if w < m { w } else { m });
                    if least <= W::zero() {
                        break;
                    }
                    for &t in &group {
                        cap[t] -= least;
                        if cap[t] <= W::zero() {
                            prop.retired[t] = true;
                        }
                    }
                    if with_v {
                        rest -= least;
                    } else {
                        base -= least;
                    }
                }
                if base + rest > need {
                    fits = false;
                    break 'outer;
                }
                total = base + rest;
            }
        }
        self.prop = prop;
        self.cap = cap;
        fits
    }

    fn explore(&mut self, cand: Bitset, cur: W, set: &mut Vec<usize>, local: &mut Local<W>) {
        if cand.is_empty() {
            Self::record(local, cur, set);
            return;
        }
        self.tick(1);
        if self.within(&cand, local.best - cur) {
            return;
        }
        let comps = self.split_components(&cand);
        if comps.len() > 1 {
            self.solve_components(comps, cur, set, local);
            return;
        }
        let v = self.branch_vertex(&cand);
        let mut with = cand.clone();
        with.remove(v);
        with.difference_with(&self.masks[v]);
        self.tick(1);
        set.push(v);
        self.branch(with, cur + self.weights[v], set, local);
        set.pop();
        if self.stats.exhausted {
            return;
        }
        let mut without = cand;
        without.remove(v);
        self.tick(1);
        self.branch(without, cur, set, local);
    }

    /// Candidate of maximum weighted degree (sum of candidate-neighbor
    /// weights), lowest index on ties.
    fn branch_vertex(&self, cand: &Bitset) -> usize {
        let mut best: Option<(usize, W)> = None;
        for v in cand.iter() {
            let mut d = W::zero();
            for (wi, (&a, &b)) in self.masks[v].words().iter().zip(cand.words()).enumerate() {
                let mut bits = a & b;
                while bits != 0 {
                    d += self.weights[wi * 64 + bits.trailing_zeros() as usize];
                    bits &= bits - 1;
                }
            }
            if best.is_none_or(|(_, bd)| d > bd) {
                best = Some((v, d));
            }
        }
        best.expect("nonempty").0
    }

    fn solve_components(
        &mut self,
        mut comps: Vec<Bitset>,
        cur: W,
        set: &mut Vec<usize>,
        local: &mut Local<W>,
    ) {
        comps.sort_by_key(|c| (c.count(), c.first()));
        let bounds: Vec<W> = comps.iter().map(|c| self.clique_cover_bound(c)).collect();
        self.tick(comps.len() as u64);
        let mut rest = crate::scalar::total(bounds.iter().copied());
        let mut acc = cur;
        let mark = set.len();
        for (comp, b) in comps.into_iter().zip(bounds) {
            rest -= b;
            let need = local.best - acc - rest;
            self.tick(1);
            let sub = self.search(comp, need, None);
            match sub.best_set {
                Some(s) if !self.stats.exhausted => {
                    acc += sub.best;
                    set.extend(s);
                }
                _ => {
                    set.truncate(mark);
                    return;
                }
            }
        }
        Self::record(local, acc, set);
        set.truncate(mark);
    }
}

/// Greedy maximal independent set by decreasing weight (ties by index).
pub fn greedy_by_weight<W: Weight>(g: &Graph<W>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| {
        g.weight(b)
            .partial_cmp(&g.weight(a))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut blocked = Bitset::new(g.n());
    let mut out = Vec::new();
    for v in order {
        if !blocked.contains(v) {
            out.push(v);
            blocked.insert(v);
            blocked.union_with(g.neighbor_mask(v));
        }
    }
    out.sort_unstable();
    out
}

/// Runs the search on the whole graph, seeded with the greedy incumbent.
pub fn branch_and_bound<W: Weight>(g: &Graph<W>, budget: Option<u64>) -> SearchResult<W> {
    let n = g.n();
    // relabel: decreasing weight, then increasing degree, then index
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        g.weight(b)
            .partial_cmp(&g.weight(a))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(g.degree(a).cmp(&g.degree(b)))
            .then(a.cmp(&b))
    });
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let masks = order
        .iter()
        .map(|&v| Bitset::from_iter(n, g.neighbors(v).iter().map(|&u| pos[u])))
        .collect();
    let weights = order.iter().map(|&v| g.weight(v)).collect();
    let mut search = Search::new(masks, weights, budget);
    let greedy = greedy_by_weight(g);
    let greedy_value = g.set_weight(&greedy);
    let seed: Vec<usize> = greedy.iter().map(|&v| pos[v]).collect();
    let local = search.search(Bitset::full(n), greedy_value, Some(seed));
    let mut solution: Vec<usize> = local
        .best_set
        .expect("seeded search keeps a solution")
        .into_iter()
        .map(|i| order[i])
        .collect();
    solution.sort_unstable();
    SearchResult {
        value: local.best,
        solution,
        stats: search.stats,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clique_cover_bound_examples() {
        let g = Graph::<f64>::build(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)], None).unwrap();
        let r = branch_and_bound(&g, None);
        assert_eq!(r.value, 2.0);
        assert!(g.is_independent_set(&r.solution).unwrap());
        assert!(r.stats.ticks >= r.stats.nodes);
    }

    #[test]
    fn propagation_closes_the_five_cycle() {
        // the greedy cover of C5 has three cliques; propagation from the
        // third shows two is enough
        let masks: Vec<Bitset> = (0..5).map(|i| Bitset::from_iter(5, [(i + 1) % 5, (i + 4) % 5])).collect();
        let mut s = Search::new(masks, vec![1.0; 5], None);
        let all = Bitset::full(5);
        assert_eq!(s.clique_cover_bound(&all), 3.0);
        assert!(s.within(&all, 2.0));
        assert!(!s.within(&all, 1.0));

        // weighted: {0, 2} weighs 4, so 3.5 must not be certified
        let masks: Vec<Bitset> = (0..5).map(|i| Bitset::from_iter(5, [(i + 1) % 5, (i + 4) % 5])).collect();
        let mut s = Search::new(masks, vec![2.0, 1.0, 2.0, 1.0, 1.0], None);
        assert!(!s.within(&all, 3.5));
        assert!(s.within(&all, 4.0));
    }

    #[test]
    fn budget_truncates() {
        let edges: Vec<_> = (0..40)
            .flat_map(|i| [(i, (i + 1) % 40), (i, (i + 7) % 40), (i, (i + 12) % 40)])
            .collect();
        let weights = (0..40).map(|i| 1.0 + (i * 37 % 11) as f64 / 10.0).collect();
        let g = Graph::<f64>::build(40, &edges, Some(weights)).unwrap();
        let full = branch_and_bound(&g, None);
        assert!(!full.stats.exhausted);
        assert!(full.stats.ticks > 20, "ticks {}", full.stats.ticks);
        let cut = branch_and_bound(&g, Some(full.stats.ticks / 2));
        assert!(cut.stats.exhausted);
        assert!(g.is_independent_set(&cut.solution).unwrap());
        assert!(cut.value <= full.value);
    }
}
