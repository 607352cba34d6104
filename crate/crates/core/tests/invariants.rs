//! Engine invariants over random small configurations.

use proptest::prelude::*;

use mkperc_core::netcap::{capture, LinkGraph};
use mkperc_core::percolation::{delta_mk, percolation_points};
use mkperc_core::sim::SimState;
use mkperc_core::{DistanceMetric, Execution, SimConfig};

fn small_config() -> impl Strategy<Value = SimConfig> {
    (
        2u32..40,
        1u32..25,
        0u32..3,
        0u32..4,
        1u32..4,
        any::<u64>(),
        any::<bool>(),
    )
        .prop_map(|(n, d_side, m, oh, ng, seed, euclid)| SimConfig {
            n,
            d_side,
            m,
            oh,
            ng,
            seed,
            metric: if euclid {
                DistanceMetric::Euclidean
            } else {
                DistanceMetric::Chebyshev
            },
            max_ticks: 60,
            ..SimConfig::default()
        })
}

fn assert_close(a: f64, b: f64, what: &str) {
    assert!((a - b).abs() < 1e-12, "{what}: {a} vs {b}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lists_only_grow_without_forgetting(cfg in small_config()) {
        let mut state = SimState::init(&cfg).unwrap();
        let n = cfg.n as u64;
        for _ in 0..cfg.max_ticks {
            let before = state.agents().to_vec();
            state.step();
            state.check_invariants().unwrap();
            for (old, new) in before.iter().zip(state.agents()) {
                // met counts never drop and nothing known is lost
                for e in &old.met {
                    let now = new.met_entry(e.other).expect("meeting record lost");
                    prop_assert!(now.count >= e.count);
                }
                for e in &old.known {
                    let now = new.knows(e.other).expect("belief lost");
                    prop_assert!(now.timestamp >= e.timestamp);
                }
                // everyone met is known
                for e in &new.met {
                    prop_assert!(new.knows(e.other).is_some());
                }
                for e in &new.known {
                    prop_assert!(e.timestamp <= state.tick());
                }
            }
            let c = state.counters();
            prop_assert!(c.arcs() <= n * (n - 1));
            prop_assert!(c.edges() <= n * (n - 1) / 2);
            prop_assert!((0.0..=1.0).contains(&c.mk()));
            prop_assert!((0.0..=1.0).contains(&c.meeting_rate()));
            // a fixed population never holds a wrong belief
            prop_assert_eq!(delta_mk(&state), 0.0);
        }
    }

    #[test]
    fn counters_agree_with_captured_networks(cfg in small_config(), pforg in 0.0f64..0.3, churn in 0.0f64..0.2) {
        let cfg = SimConfig { pforg, chgr: true, p_change: churn, ..cfg };
        let mut state = SimState::init(&cfg).unwrap();
        for t in 0..30u64 {
            state.step();
            let row = state.metrics_row();
            let (meeting, knowledge) = capture(&state).unwrap();
            let (pm, pk) = percolation_points(&meeting, &knowledge, t + 1);
            prop_assert_eq!(row.meeting.links, pm.links);
            prop_assert_eq!(row.knowledge.links, pk.links);
            prop_assert_eq!(row.meeting.percolating, pm.percolating);
            prop_assert_eq!(row.knowledge.percolating, pk.percolating);
            prop_assert_eq!(row.meeting.k, pm.k);
            prop_assert_eq!(row.knowledge.k, pk.k);
            for (a, b, what) in [
                (row.meeting.ps, pm.ps, "meeting ps"),
                (row.meeting.psg, pm.psg, "meeting psg"),
                (row.meeting.pbg, pm.pbg, "meeting pbg"),
                (row.knowledge.ps, pk.ps, "knowledge ps"),
                (row.knowledge.psg, pk.psg, "knowledge psg"),
                (row.knowledge.pbg, pk.pbg, "knowledge pbg"),
                (row.delta_mk, delta_mk(&state), "delta mk"),
            ] {
                assert_close(a, b, what);
            }
            prop_assert!(knowledge.link_count() as u64 <= u64::from(cfg.n) * u64::from(cfg.n - 1));
        }
    }

    #[test]
    fn parallel_and_sequential_runs_are_identical(cfg in small_config(), pforg in 0.0f64..0.2) {
        let cfg = SimConfig { pforg, chgr: true, p_change: 0.05, ..cfg };
        let mut seq = SimState::init(&cfg).unwrap();
        seq.set_execution(Execution::Sequential);
        let mut par = SimState::init(&cfg).unwrap();
        par.set_execution(Execution::Parallel);
        for _ in 0..cfg.max_ticks {
            seq.step();
            par.step();
        }
        prop_assert_eq!(seq.agents(), par.agents());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exchange_closure_and_growth_bounds(cfg in small_config()) {
        let mut state = SimState::init(&cfg).unwrap();
        let n = u64::from(cfg.n);
        for _ in 0..cfg.max_ticks {
            // replay the first phases of the next tick on a copy
            let mut probe = state.clone();
            probe.move_all();
            let pairs = probe.detect_meetings();
            let before = probe.agents().to_vec();
            let (arcs0, edges0) = (probe.counters().arcs(), probe.counters().edges());
            let first_time = pairs
                .iter()
                .filter(|(a, b)| before[a.index()].met_entry(*b).is_none())
                .count() as u64;
            probe.exchange_knowledge(&pairs);
            let after = probe.agents();
            for &(a, b) in &pairs {
                for (x, y) in [(a, b), (b, a)] {
                    for e in &before[y.index()].known {
                        prop_assert!(after[x.index()].knows(e.other).is_some());
                    }
                }
            }
            prop_assert!(probe.counters().arcs() - arcs0 <= pairs.len() as u64 * 2 * (n - 1));
            prop_assert_eq!(probe.counters().edges() - edges0, first_time);
            let (meeting, knowledge) = capture(&probe).unwrap();
            for ((a, b), _) in meeting.edges() {
                prop_assert!(knowledge.arc(a, b).is_some() && knowledge.arc(b, a).is_some());
            }
            state.step();
        }
    }
}

#[test]
fn same_seed_gives_identical_event_log() {
    let cfg = SimConfig {
        n: 200,
        d_side: 30,
        oh: 1,
        pforg: 0.05,
        chgr: true,
        p_change: 0.01,
        seed: 42,
        ..SimConfig::default()
    };
    let run = || {
        let mut s = SimState::init(&cfg).unwrap();
        s.enable_event_log();
        for _ in 0..200 {
            s.step();
        }
        (s.take_event_log().unwrap(), s.agents().to_vec())
    };
    let (log_a, agents_a) = run();
    let (log_b, agents_b) = run();
    assert!(!log_a.is_empty());
    assert_eq!(log_a, log_b);
    assert_eq!(agents_a, agents_b);

    let other = SimState::init(&SimConfig { seed: 43, ..cfg.clone() }).unwrap();
    let first = SimState::init(&cfg).unwrap();
    assert_ne!(
        other.agents().iter().map(|a| a.pos).collect::<Vec<_>>(),
        first.agents().iter().map(|a| a.pos).collect::<Vec<_>>()
    );
}

#[test]
fn large_population_parallel_matches_sequential() {
    // big enough to cross the parallel chunking thresholds
    let cfg = SimConfig {
        n: 10_000,
        d_side: 200,
        oh: 2,
        pforg: 0.01,
        chgr: true,
        p_change: 0.01,
        seed: 9,
        ..SimConfig::default()
    };
    let mut seq = SimState::init(&cfg).unwrap();
    seq.set_execution(Execution::Sequential);
    let mut par = SimState::init(&cfg).unwrap();
    for _ in 0..20 {
        seq.step();
        par.step();
    }
    assert_eq!(seq.agents(), par.agents());
    assert_eq!(seq.metrics_row(), par.metrics_row());
}

#[test]
fn single_cell_world_saturates_in_one_tick() {
    let cfg = SimConfig {
        n: 12,
        d_side: 1,
        m: 1,
        ..SimConfig::default()
    };
    let mut s = SimState::init(&cfg).unwrap();
    s.step();
    assert_eq!(s.counters().mk(), 1.0);
    assert_eq!(s.counters().meeting_rate(), 1.0);
    assert!(s.agents().iter().all(|a| a.pos == (0, 0)));
}

#[test]
fn lone_agent_only_moves() {
    let cfg = SimConfig {
        n: 1,
        d_side: 50,
        m: 2,
        ..SimConfig::default()
    };
    let mut s = SimState::init(&cfg).unwrap();
    for _ in 0..100 {
        s.step();
        let a = &s.agents()[0];
        assert_eq!((a.known.len(), a.met.len()), (1, 1));
    }
    assert_eq!(s.counters().mk(), 1.0);
}
