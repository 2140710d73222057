use dpchroma::blocking::{enumerate_column_classes, is_bad_for};
use dpchroma::bounds::{
    bad_prob_exact, chosen_t, exact_bad_fraction, floor_expected_survivors, theorem3_m,
};
use dpchroma::construct::{derandomized_cover, derandomized_trace, extend_to_uncolorable, random_cover, surviving_assignments};
use dpchroma::mu::{cover_from_columns, decide_uncoverable, mu_exact, DEFAULT_NODE_BUDGET};
use dpchroma::perm::{factorial, universe_size};
use dpchroma::solver::{find_coloring_extending, Colorability, DEFAULT_COVER_BUDGET};
use dpchroma::{
    blocked_set, chi_dp_exact, complete_bipartite, cycle, find_coloring, Assignment, Graph,
    MatchingCover, Permutation,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_graphs() -> Vec<Graph> {
    vec![
        cycle(3).unwrap(),
        cycle(4).unwrap(),
        cycle(5).unwrap(),
        cycle(6).unwrap(),
        complete_bipartite(2, 3).unwrap(),
        complete_bipartite(1, 3).unwrap(),
        Graph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap(),
        Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]).unwrap(),
    ]
}

fn random_cover_on(g: &Graph, k: usize, seed: u64) -> MatchingCover {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = (0..g.edge_count())
        .map(|_| {
            let mut v: Vec<usize> = (0..k).collect();
            v.shuffle(&mut rng);
            Permutation::new(v).unwrap()
        })
        .collect();
    MatchingCover::from_edge_list(g.clone(), k, m).unwrap()
}

fn all_colorings(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..k.pow(n as u32)).map(move |mut x| {
        (0..n)
            .map(|_| {
                let c = x % k;
                x /= k;
                c
            })
            .collect()
    })
}

fn brute_colorable(c: &MatchingCover) -> bool {
    all_colorings(c.graph().vertex_count(), c.fold()).any(|col| c.is_valid_coloring(&col))
}

fn independent_in_h(c: &MatchingCover, col: &[usize]) -> bool {
    let h = c.explicit_graph();
    let k = c.fold();
    let chosen: Vec<usize> = col.iter().enumerate().map(|(v, &i)| v * k + i).collect();
    chosen
        .iter()
        .enumerate()
        .all(|(a, &x)| chosen[a + 1..].iter().all(|&y| h.edge_index(x.min(y), x.max(y)).is_none()))
}

fn chromatic_number(g: &Graph) -> usize {
    (1..=g.vertex_count())
        .find(|&c| {
            all_colorings(g.vertex_count(), c).any(|col| g.edges().iter().all(|&(u, v)| col[u] != col[v]))
        })
        .unwrap()
}

fn arb_cover() -> impl Strategy<Value = MatchingCover> {
    (0..small_graphs().len(), 1usize..=3, any::<u64>())
        .prop_map(|(gi, k, seed)| random_cover_on(&small_graphs()[gi], k, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn validity_matches_independence_in_h(c in arb_cover()) {
        for col in all_colorings(c.graph().vertex_count(), c.fold()) {
            prop_assert_eq!(c.is_valid_coloring(&col), independent_in_h(&c, &col));
        }
    }

    #[test]
    fn solver_matches_brute_force(c in arb_cover()) {
        let found = find_coloring(&c);
        prop_assert_eq!(found.is_some(), brute_colorable(&c));
        if let Some(col) = found {
            prop_assert!(c.is_valid_coloring(&col));
        }
    }

    #[test]
    fn relabeling_preserves_colorability(c in arb_cover(), v in 0usize..8, seed in any::<u64>()) {
        let v = v % c.graph().vertex_count();
        let mut img: Vec<usize> = (0..c.fold()).collect();
        img.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let tau = Permutation::new(img).unwrap();
        let r = c.relabel_fiber(v, &tau).unwrap();
        prop_assert_eq!(brute_colorable(&r), brute_colorable(&c));
        if let Some(mut col) = find_coloring(&c) {
            col[v] = tau.apply(col[v]);
            prop_assert!(r.is_valid_coloring(&col));
        }
    }

    #[test]
    fn normalization_keeps_colorability(c in arb_cover()) {
        let n = c.normalize().unwrap();
        for e in n.graph().spanning_tree_edges() {
            prop_assert!(n.matchings()[e].is_identity());
        }
        prop_assert_eq!(find_coloring(&n).is_some(), find_coloring(&c).is_some());
        prop_assert_eq!(n.normalize().unwrap(), n);
    }

    #[test]
    fn colorable_iff_some_assignment_survives(k in 1usize..=3, t in 1usize..=8, seed in any::<u64>()) {
        let c = random_cover(k, t, seed).unwrap();
        let survivors = surviving_assignments(&c).unwrap();
        prop_assert_eq!(find_coloring(&c).is_some(), !survivors.is_empty());
        for idx in 0..universe_size(k) {
            let f = Assignment::decode(k, idx).unwrap();
            let mut partial: Vec<Option<usize>> = f.colors().iter().map(|&x| Some(x)).collect();
            partial.resize(k + t, None);
            let extends = matches!(find_coloring_extending(&c, &partial, u64::MAX), Colorability::Colorable(_));
            prop_assert_eq!(extends, survivors.contains(idx));
        }
    }

    #[test]
    fn cover_json_round_trip(c in arb_cover()) {
        let text = c.to_json();
        let back = MatchingCover::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
        prop_assert_eq!(back, c);
    }
}

#[test]
fn chi_dp_at_least_chromatic_number() {
    let mut graphs = small_graphs();
    graphs.extend((7..=8).map(|n| cycle(n).unwrap()));
    graphs.push(complete_bipartite(2, 2).unwrap());
    for g in &graphs {
        let col = g.smallest_last_order().1;
        let chi_dp = chi_dp_exact(g, col, DEFAULT_COVER_BUDGET).unwrap();
        let chi = chromatic_number(g);
        assert!(chi <= chi_dp && chi_dp <= col, "{g}: chi={chi} chi_dp={chi_dp} col={col}");
    }
}

#[test]
fn chi_dp_is_monotone_in_t() {
    for k in 2..=3 {
        let values: Vec<usize> = (1..=4)
            .map(|t| chi_dp_exact(&complete_bipartite(k, t).unwrap(), k + 1, DEFAULT_COVER_BUDGET).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1]), "k={k}: {values:?}");
        assert_eq!(values[0], 2);
    }
}

#[test]
fn mu_agrees_with_chi_dp() {
    for k in 1..=2 {
        let mu = mu_exact(k, DEFAULT_NODE_BUDGET).unwrap().value.hi();
        for t in 1..=mu + 1 {
            let chi = chi_dp_exact(&complete_bipartite(k, t).unwrap(), k + 1, DEFAULT_COVER_BUDGET).unwrap();
            assert_eq!(chi == k + 1, t >= mu, "k={k} t={t} chi={chi}");
        }
    }
}

#[test]
fn blocked_sets_match_precolored_extension() {
    for k in 1..=3 {
        for col in enumerate_column_classes(k).unwrap() {
            let cover = cover_from_columns(k, std::slice::from_ref(&col)).unwrap();
            let set = blocked_set(&col);
            assert_eq!(set.count(), factorial(k));
            for idx in 0..universe_size(k) {
                let f = Assignment::decode(k, idx).unwrap();
                let mut partial: Vec<Option<usize>> = f.colors().iter().map(|&x| Some(x)).collect();
                partial.push(None);
                let stuck = find_coloring_extending(&cover, &partial, u64::MAX) == Colorability::Uncolorable;
                assert_eq!(stuck, is_bad_for(&f, &col));
                assert_eq!(stuck, set.contains(idx));
            }
        }
    }
}

#[test]
fn threshold_is_monotone_around_mu() {
    for k in 1..=3 {
        let mu = mu_exact(k, DEFAULT_NODE_BUDGET).unwrap().value.hi();
        if mu > 1 {
            assert!(!decide_uncoverable(k, mu - 1, DEFAULT_NODE_BUDGET).unwrap());
        }
        assert!(decide_uncoverable(k, mu, DEFAULT_NODE_BUDGET).unwrap());
        assert!(decide_uncoverable(k, mu + 1, DEFAULT_NODE_BUDGET).unwrap());
    }
}

#[test]
fn derandomized_steps_meet_expectation() {
    for (k, t) in [(2, 3), (3, 9), (4, 20), (5, 12)] {
        let (_, trace) = derandomized_trace(k, t).unwrap();
        let n = universe_size(k) as u128;
        let keep = n - factorial(k) as u128;
        let mut prev = n;
        for &s in &trace {
            assert!(s as u128 <= prev * keep / n, "k={k}: {s} after {prev}");
            prev = s as u128;
        }
        assert!(prev <= floor_expected_survivors(k, t));
    }
}

#[test]
fn single_column_bad_fraction() {
    for k in 1..=4 {
        assert_eq!(exact_bad_fraction(k).unwrap(), bad_prob_exact(k), "k={k}");
    }
}

#[test]
fn greedy_pipeline_stays_within_bound() {
    for k in 1..=4 {
        let t = chosen_t(k).unwrap().max(1);
        let cover = derandomized_cover(k, t).unwrap();
        let (ext, r) = extend_to_uncolorable(&cover).unwrap();
        assert!(t + r <= theorem3_m(k, t).unwrap(), "k={k}: {t}+{r}");
        assert_eq!(ext.graph().vertex_count(), k + t + r);
        assert!(find_coloring(&ext).is_none());
    }
}

#[test]
fn brute_force_mu3() {
    let sets: Vec<u32> = enumerate_column_classes(3)
        .unwrap()
        .iter()
        .map(|c| blocked_set(c).iter().fold(0u32, |acc, e| acc | 1 << e))
        .collect();
    let full = (1u32 << 27) - 1;
    let n = sets.len();
    let mut five = false;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let u = sets[a] | sets[b] | sets[c] | sets[d];
                    five |= (d + 1..n).any(|e| u | sets[e] == full);
                }
            }
        }
    }
    assert!(!five);
    let r = mu_exact(3, DEFAULT_NODE_BUDGET).unwrap();
    assert_eq!(r.value.hi(), 6);
    let u = r.witness_columns.iter().fold(0u32, |acc, c| acc | blocked_set(c).iter().fold(0, |x, e| x | 1 << e));
    assert_eq!(u, full);
}
