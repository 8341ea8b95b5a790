mod common;

use std::f64::consts::PI;

use common::*;
use proptest::prelude::*;
use qcolor::circuit::{self, build_qaoa};
use qcolor::encodings::{decode, qubit_cost, success_probability};
use qcolor::graph::{enumerate_3colorable, random_tripartite, Connectivity};
use qcolor::train::{train, QaoaObjective};
use qcolor::{Axis, CMatrix, EncodingKind, GateInstance, GateKind, Graph, ShiftRule, Subspace, TrainConfig};

fn subspace(i: usize) -> Subspace {
    [Subspace::S01, Subspace::S02, Subspace::S12][i]
}

fn rotation(axis: usize, s: Subspace) -> GateKind {
    match axis {
        0 => GateKind::Trx(s),
        1 => GateKind::Try(s),
        _ => GateKind::Trz(s),
    }
}

/// `exp(-i theta G / 2)` for a generator with `G^3 = G` (here l1, l2, l3).
fn half_angle_exp(g: &CMatrix, theta: f64) -> CMatrix {
    let p = matmul(g, g);
    let id = identity(3);
    let (cs, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    &(&id - &p) + &p.mapv(|z| z * cs) - g.mapv(|z| z * c(0.0, sn))
}

fn random_hermitian(rng: &mut rand_chacha::ChaCha8Rng) -> CMatrix {
    use rand::Rng;
    let a = CMatrix::from_shape_fn((3, 3), |_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    (&a + &dagger(&a)).mapv(|z| z * 0.5)
}

fn random_graph(n: usize, mask: u32) -> Graph {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    Graph::new(
        n,
        pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotations_compose(axis in 0usize..3, s in 0usize..3, a in -7.0f64..7.0, b in -7.0f64..7.0) {
        let k = rotation(axis, subspace(s));
        let prod = matmul(&k.matrix(Some(a)).unwrap(), &k.matrix(Some(b)).unwrap());
        prop_assert!(max_diff(&prod, &k.matrix(Some(a + b)).unwrap()) < 1e-10);
    }

    #[test]
    fn rotation_generators(theta in -7.0f64..7.0) {
        let gm = gell_mann_oracle();
        for (kind, g) in [
            (GateKind::Trx(Subspace::S01), &gm[0]),
            (GateKind::Try(Subspace::S01), &gm[1]),
            (GateKind::Trz(Subspace::S01), &gm[2]),
        ] {
            let u = kind.matrix(Some(theta)).unwrap();
            prop_assert!(max_diff(&u, &half_angle_exp(g, theta)) < 1e-10);
        }
    }

    #[test]
    fn rotation_matrix_matches_axis_builder(axis in 0usize..3, s in 0usize..3, theta in -7.0f64..7.0) {
        let ax = [Axis::X, Axis::Y, Axis::Z][axis];
        let a = qcolor::gates::subspace_rotation(ax, subspace(s), theta);
        prop_assert!(max_diff(&a, &rotation(axis, subspace(s)).matrix(Some(theta)).unwrap()) == 0.0);
        prop_assert!(unitarity_defect(&a) < 1e-12);
    }

    #[test]
    fn peephole_keeps_unitary_and_never_grows(ops in prop::collection::vec((0usize..4, 0usize..3, 0usize..3), 0..24)) {
        let gates: Vec<GateInstance> = ops
            .iter()
            .map(|&(op, a, b)| {
                let b = if a == b { (a + 1) % 3 } else { b };
                match op {
                    0 => GateInstance::fixed(GateKind::Cnot, &[a, b]),
                    1 => GateInstance::fixed(GateKind::Cnot, &[b, a]),
                    2 => GateInstance::fixed(GateKind::H, &[a]),
                    _ => GateInstance::bound(GateKind::Rz, a, qcolor::ParamBinding::new(0)),
                }
            })
            .collect();
        let before = qcolor::Circuit::new(3, 2, gates.clone(), 1).unwrap();
        let after = before.peephole();
        prop_assert!(after.len() <= before.len());
        let diff = max_diff(&before.unitary(&[0.83]).unwrap(), &after.unitary(&[0.83]).unwrap());
        prop_assert!(diff < 1e-12);
    }

    #[test]
    fn removing_a_gate_never_increases_depth(n in 2usize..6, mask in any::<u32>(), qubit in any::<bool>(), pick in any::<prop::sample::Index>()) {
        let g = random_graph(n, mask);
        let enc = if qubit { EncodingKind::QubitSpaceEfficient } else { EncodingKind::Qutrit };
        let c = build_qaoa(&g, enc, 1, 2.0).unwrap();
        let mut gates = c.gates().to_vec();
        let full = circuit::depth(&gates, c.num_sites());
        gates.remove(pick.index(gates.len()));
        prop_assert!(circuit::depth(&gates, c.num_sites()) <= full);
    }

    #[test]
    fn postselected_at_least_raw(n in 1usize..4, mask in any::<u32>(), params in prop::collection::vec(-PI..PI, 6)) {
        let g = random_graph(n, mask);
        let obj = QaoaObjective::new(&g, EncodingKind::QubitSpaceEfficient, 2, 2.0).unwrap();
        let s = obj.success(&params).unwrap();
        prop_assert!(s.postselected >= s.raw - 1e-15);
        let direct = success_probability(&g, EncodingKind::QubitSpaceEfficient, &obj.state(&params).unwrap().probabilities());
        prop_assert_eq!(direct, s);
    }

    #[test]
    fn tripartite_graphs_are_valid(parts in 2usize..6, conn in 0usize..3, seed in any::<u64>()) {
        let conn = [Connectivity::Low, Connectivity::High, Connectivity::Highest][conn];
        let n = 3 * parts;
        let g = random_tripartite(n, conn, seed).unwrap();
        prop_assert!(g.is_connected());
        let colors = g.three_color().unwrap();
        prop_assert!(g.edges().iter().all(|&(u, v)| colors[u] != colors[v]));
        for u in 0..n {
            for v in u + 1..n {
                if u % 3 == v % 3 {
                    prop_assert!(!g.has_edge(u, v));
                }
            }
        }
    }
}

#[test]
fn single_rotation_shift_rule_matches_finite_differences() {
    let mut rng = rng(5);
    let mut worst: f64 = 0.0;
    for trial in 0..120 {
        let kind = rotation(trial % 3, subspace(trial / 3 % 3));
        let psi = random_state(3, &mut rng);
        let obs = random_hermitian(&mut rng);
        let theta = (trial as f64 * 0.37) % (2.0 * PI) - PI;
        let f = |t: f64| {
            let u = kind.matrix(Some(t)).unwrap();
            let out: Vec<_> = (0..3).map(|i| (0..3).map(|j| u[[i, j]] * psi[j]).sum()).collect();
            expectation(&obs, &out)
        };
        let shift = ShiftRule::for_gate(kind).unwrap().apply(theta, f);
        let h = 1e-5;
        let fd = (f(theta + h) - f(theta - h)) / (2.0 * h);
        worst = worst.max((shift - fd).abs());
    }
    assert!(worst < 1e-6, "worst deviation {worst}");
}

#[test]
fn enumeration_matches_brute_force_isomorphism_classes() {
    for n in 1..=6 {
        let mut reps: Vec<Graph> = Vec::new();
        for g in all_graphs(n) {
            if !g.is_connected() || !brute_force_three_colorable(&g) {
                continue;
            }
            if !reps.iter().any(|r| isomorphic(r, &g)) {
                reps.push(g);
            }
        }
        let listed = enumerate_3colorable(n, 0, n * (n - 1) / 2, usize::MAX).unwrap();
        assert_eq!(listed.len(), reps.len(), "n = {n}");
        for (i, a) in listed.iter().enumerate() {
            assert!(brute_force_three_colorable(a));
            for b in &listed[i + 1..] {
                assert!(!isomorphic(a, b));
            }
        }
    }
}

#[test]
fn enumeration_respects_edge_window() {
    let listed = enumerate_3colorable(5, 5, 6, usize::MAX).unwrap();
    assert!(!listed.is_empty());
    assert!(listed.iter().all(|g| (5..=6).contains(&g.num_edges())));
    assert!(enumerate_3colorable(4, 6, 6, usize::MAX).unwrap().is_empty());
}

#[test]
fn three_color_agrees_with_exhaustive_search() {
    for n in 1..=5 {
        for g in all_graphs(n) {
            assert_eq!(g.three_color().is_some(), brute_force_three_colorable(&g));
        }
    }
}

#[test]
fn qubit_proper_states_strictly_below_all_others() {
    for n in 1..=3 {
        for g in all_graphs(n) {
            let mut proper_max = f64::NEG_INFINITY;
            let mut other_min = f64::INFINITY;
            for i in 0..1usize << (2 * n) {
                let bits: Vec<u8> = digits(i, 2, 2 * n).into_iter().map(|b| b as u8).collect();
                let colors = decode(EncodingKind::QubitSpaceEfficient, &bits);
                let proper = colors.0.iter().all(|c| c.is_some())
                    && is_proper(&g, &colors.0.iter().map(|c| c.unwrap() as usize).collect::<Vec<_>>());
                let cost = qubit_cost(&g, 2.0, &bits);
                if proper {
                    proper_max = proper_max.max(cost);
                } else {
                    other_min = other_min.min(cost);
                }
            }
            assert!(proper_max < other_min, "{g:?}");
        }
    }
}

#[test]
fn training_contracts_on_standard_set() {
    let set = enumerate_3colorable(4, 0, 6, usize::MAX).unwrap();
    let (mut steps, mut monotone) = (0usize, 0usize);
    for g in &set {
        for layers in 1..=2 {
            let config = TrainConfig::qutrit(layers).with_seed(9);
            let r = train(g, &config).unwrap();
            assert_eq!(r.params.len(), 2 * layers);
            assert!(r.params.iter().all(|p| p.is_finite()));
            assert_eq!(r.trace.len(), r.steps_taken + 1);
            assert!(r.same_outcome(&train(g, &config).unwrap()));
            let costs = r.cost_trace();
            let best: Vec<f64> = costs
                .iter()
                .scan(f64::INFINITY, |b, &c| {
                    *b = b.min(c);
                    Some(*b)
                })
                .collect();
            for w in best.windows(2) {
                steps += 1;
                if w[1] <= w[0] {
                    monotone += 1;
                }
            }
            assert!(r.final_cost() < costs[0]);
        }
    }
    assert!(
        monotone as f64 >= 0.95 * steps as f64,
        "{monotone}/{steps} non-increasing steps"
    );

    let mut q = TrainConfig::qubit(1).with_seed(2);
    q.max_steps = 3;
    q.min_steps = 0;
    let r = train(&set[0], &q).unwrap();
    assert_eq!(r.params.len(), 3);
}
