use proptest::prelude::*;

use exttsp::cycle_cover::{cycle_cover_run, max_weight_2matching};
use exttsp::gen::{gen_random_graph, gen_random_tree, WeightRange};
use exttsp::greedy::{greedy, greedy_naive, GreedyOptions, Start};
use exttsp::io::{parse_instance, parse_layout, serialize_instance, serialize_layout, Instance};
use exttsp::local_search::{local_search_solve, LocalSearchOptions};
use exttsp::oracle::{brute_force_opt, brute_force_opt_with, OracleConfig};
use exttsp::tree_exact::tree_opt;
use exttsp::{merge_directed, realized_edges, score, Discount, Graph, Layout, TOLERANCE};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect();
        proptest::sample::subsequence(pairs.clone(), 0..=pairs.len())
            .prop_flat_map(move |chosen| {
                let len = chosen.len();
                (Just(chosen), proptest::collection::vec(1u32..20, len))
            })
            .prop_map(move |(chosen, ws)| {
                Graph::new(n, chosen.into_iter().zip(ws).map(|((u, v), w)| (u, v, w as f64))).unwrap()
            })
    })
}

fn layout_for(n: usize) -> impl Strategy<Value = Layout> {
    Just((1..=n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(move |order| Layout::from_order(n, order).unwrap())
}

fn discount_strategy() -> impl Strategy<Value = Discount> {
    (1usize..=4, 0u8..3, proptest::collection::vec(0.0f64..=1.0, 3)).prop_map(|(k, kind, raw)| match kind {
        0 => Discount::step(k).unwrap(),
        1 => Discount::linear(k).unwrap(),
        _ => {
            let mut table = vec![1.0];
            for i in 1..k {
                let last: f64 = table[i - 1];
                table.push(last * raw[i - 1]);
            }
            Discount::from_table(table).unwrap()
        }
    })
}

fn graph_and_layout(max_n: usize) -> impl Strategy<Value = (Graph, Layout)> {
    graph_strategy(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), layout_for(n))
    })
}

/// Best edge subset with all degrees at most 2, over all `2^m` subsets.
fn exhaustive_2matching(g: &Graph) -> f64 {
    let m = g.m();
    let mut best = 0.0;
    for mask in 0u32..(1 << m) {
        let mut deg = vec![0; g.n() + 1];
        let mut w = 0.0;
        let mut ok = true;
        for (i, e) in g.edges().iter().enumerate() {
            if mask >> i & 1 == 1 {
                deg[e.u] += 1;
                deg[e.v] += 1;
                if deg[e.u] > 2 || deg[e.v] > 2 {
                    ok = false;
                    break;
                }
                w += e.w;
            }
        }
        if ok && w > best {
            best = w;
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reversal_invariance((g, layout) in graph_and_layout(9), f in discount_strategy()) {
        prop_assert_eq!(score(&g, &layout, &f).unwrap(), score(&g, &layout.reversed(), &f).unwrap());
    }

    #[test]
    fn relabeling_invariance((g, layout) in graph_and_layout(9), f in discount_strategy(), seed in any::<u64>()) {
        let n = g.n();
        let mut perm: Vec<usize> = (1..=n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let moved: Vec<usize> = layout.order().iter().map(|&v| perm[v - 1]).collect();
        let a = score(&g, &layout, &f).unwrap();
        let b = score(&g.relabel(&perm).unwrap(), &Layout::from_order(n, moved).unwrap(), &f).unwrap();
        prop_assert!((a - b).abs() <= TOLERANCE);
    }

    #[test]
    fn merge_invariance(
        n in 2usize..8,
        raw in proptest::collection::vec((1usize..8, 1usize..8, 1u32..10), 0..20),
        f in discount_strategy(),
    ) {
        let arcs: Vec<(usize, usize, f64)> = raw
            .into_iter()
            .filter(|&(u, v, _)| u != v && u <= n && v <= n)
            .map(|(u, v, w)| (u, v, w as f64))
            .collect();
        let g = merge_directed(n, &arcs).unwrap();
        let layout = Layout::identity(n);
        let directed: f64 = arcs
            .iter()
            .map(|&(u, v, w)| f.at(layout.position(u).abs_diff(layout.position(v))) * w)
            .sum();
        prop_assert!((directed - score(&g, &layout, &f).unwrap()).abs() <= TOLERANCE);
    }

    #[test]
    fn raising_the_discount_never_lowers_a_score(
        (g, layout) in graph_and_layout(8),
        f in discount_strategy(),
        at in 0usize..4,
        bump in 0.0f64..1.0,
    ) {
        let mut table = f.table().to_vec();
        let i = at % table.len();
        if i > 0 {
            let cap = table[i - 1];
            table[i] += (cap - table[i]) * bump;
        }
        let raised = Discount::from_table(table).unwrap();
        prop_assert!(score(&g, &layout, &raised).unwrap() >= score(&g, &layout, &f).unwrap() - TOLERANCE);
    }

    #[test]
    fn realized_edges_are_the_step_contributors((g, layout) in graph_and_layout(9), k in 1usize..5) {
        let realized = realized_edges(&g, &layout, k).unwrap();
        let step = Discount::step(k).unwrap();
        let expected: Vec<_> = g
            .edges()
            .iter()
            .filter(|e| step.at(layout.position(e.u).abs_diff(layout.position(e.v))) > 0.0)
            .copied()
            .collect();
        prop_assert_eq!(realized, expected);
    }

    #[test]
    fn instance_and_layout_round_trip((g, layout) in graph_and_layout(10)) {
        let inst = Instance::new(g).with_comment("seed 3");
        let text = serialize_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(parse_layout(&serialize_layout(&layout, &inst), &inst).unwrap(), layout);
    }

    #[test]
    fn greedy_heap_matches_rescan(g in graph_strategy(10), f in discount_strategy(), start in 0usize..11) {
        let opts = GreedyOptions {
            start: if start == 0 || start > g.n() { Start::Auto } else { Start::Vertex(start) },
            ..GreedyOptions::default()
        };
        let fast = greedy(&g, &f, &opts).unwrap();
        let slow = greedy_naive(&g, &f, &opts).unwrap();
        prop_assert_eq!(&fast.layout, &slow.layout);
        prop_assert!(fast.stat("priority_updates").unwrap() <= (2 * g.m() + g.n()) as u64);
    }

    #[test]
    fn cycle_cover_keeps_the_broken_matching(g in graph_strategy(10), f in discount_strategy()) {
        let run = cycle_cover_run(&g, &f).unwrap();
        prop_assert!(run.report.value >= run.matching.weight() - run.paths.removed_weight() - TOLERANCE);
        prop_assert!(run.matching.max_degree(g.n()) <= 2);
    }

    #[test]
    fn local_search_never_loses(g in graph_strategy(7), f in discount_strategy(), delta in 0.0f64..0.2) {
        let k = f.k();
        prop_assume!(k <= g.n());
        let ell = (k + 1).min(g.n());
        let init = greedy(&g, &f, &GreedyOptions::default()).unwrap();
        let mut opts = LocalSearchOptions::new(ell, delta);
        opts.init = Some(init.layout.clone());
        let r = local_search_solve(&g, &f, &opts).unwrap();
        prop_assert!(r.value >= init.value - TOLERANCE);
        opts.parallel = false;
        prop_assert_eq!(local_search_solve(&g, &f, &opts).unwrap().layout, r.layout);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn reversal_pruning_keeps_the_optimum(g in graph_strategy(7), f in discount_strategy()) {
        let pruned = brute_force_opt(&g, &f).unwrap().1;
        let cfg = OracleConfig { reversal_pruning: false, ..OracleConfig::default() };
        let full = brute_force_opt_with(&g, &f, &cfg).unwrap().1;
        prop_assert_eq!(pruned, full);
    }

    #[test]
    fn two_matching_matches_exhaustive_search(n in 3usize..8, m in 0usize..13, seed in any::<u64>()) {
        let m = m.min(n * (n - 1) / 2);
        let g = gen_random_graph(n, m, seed, WeightRange::new(1, 7).unwrap()).unwrap();
        prop_assert_eq!(max_weight_2matching(&g).weight(), exhaustive_2matching(&g));
    }

    #[test]
    fn tree_optimum_dominates_every_layout(n in 1usize..9, seed in any::<u64>(), f in discount_strategy(), probe in any::<u64>()) {
        prop_assume!(f.k() <= 3);
        let t = gen_random_tree(n, seed, WeightRange::new(1, 5).unwrap()).unwrap();
        let exact = tree_opt(&t, &f).unwrap();
        let (_, opt) = brute_force_opt(t.graph(), &f).unwrap();
        prop_assert!((exact.value - opt).abs() <= TOLERANCE);
        let mut order: Vec<usize> = (1..=n).collect();
        order.rotate_left(probe as usize % n);
        let other = score(t.graph(), &Layout::from_order(n, order).unwrap(), &f).unwrap();
        prop_assert!(other <= exact.value + TOLERANCE);
    }
}
