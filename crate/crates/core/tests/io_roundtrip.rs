//! Export formats: golden text and write/read round-trips.

use std::path::Path;

use proptest::prelude::*;

use mkperc_core::experiments::{run_simulation, RunOptions};
use mkperc_core::netcap::{
    capture, parse_pajek, read_knowledge_csv, read_meeting_csv, read_metrics_csv, write_knowledge_csv,
    write_meeting_csv, write_metrics_csv, write_pajek, ArcInfo, DiscardSnapshots, KnowledgeNetwork,
    LinkGraph, MeetingNetwork,
};
use mkperc_core::sim::{GroupId, SimState};
use mkperc_core::SimConfig;

fn meeting_net() -> impl Strategy<Value = MeetingNetwork> {
    (1usize..25).prop_flat_map(|n| {
        prop::collection::vec((0..n as u32, 0..n as u32, 1u64..50), 0..40).prop_map(move |links| {
            let mut g = MeetingNetwork::new(n);
            for (a, b, w) in links {
                if a != b {
                    g.add_meetings(a, b, w).unwrap();
                }
            }
            g
        })
    })
}

fn knowledge_net() -> impl Strategy<Value = KnowledgeNetwork> {
    (1usize..25).prop_flat_map(|n| {
        prop::collection::vec((0..n as u32, 0..n as u32, 0u32..4, 0u64..1000), 0..60).prop_map(
            move |arcs| {
                let mut g = KnowledgeNetwork::new(n);
                for (i, j, group, timestamp) in arcs {
                    if i != j {
                        let info = ArcInfo {
                            group: GroupId(group),
                            timestamp,
                        };
                        g.insert_arc(i, j, info).unwrap();
                    }
                }
                g
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pajek_meeting_round_trip(g in meeting_net()) {
        let text = write_pajek(&g);
        let back = parse_pajek(&text, Path::new("mem.net")).unwrap().into_meeting().unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn pajek_knowledge_round_trip_keeps_arcs(g in knowledge_net()) {
        // Pajek arcs carry no payload, so compare the arc set only
        let text = write_pajek(&g);
        let back = parse_pajek(&text, Path::new("mem.net")).unwrap().into_knowledge().unwrap();
        let want: Vec<_> = g.arcs().map(|(k, _)| k).collect();
        let got: Vec<_> = back.arcs().map(|(k, _)| k).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn csv_round_trips(m in meeting_net(), k in knowledge_net()) {
        let dir = tempfile::tempdir().unwrap();
        let mp = dir.path().join("m.csv");
        let kp = dir.path().join("k.csv");
        write_meeting_csv(&m, &mp).unwrap();
        write_knowledge_csv(&k, &kp).unwrap();
        prop_assert_eq!(read_meeting_csv(&mp, m.node_count()).unwrap(), m);
        prop_assert_eq!(read_knowledge_csv(&kp, k.node_count()).unwrap(), k);
    }
}

#[test]
fn pajek_golden_for_a_captured_pair() {
    // three agents sharing the only cell for two ticks
    let cfg = SimConfig {
        n: 3,
        d_side: 1,
        m: 0,
        ..SimConfig::default()
    };
    let mut s = SimState::init(&cfg).unwrap();
    s.step();
    s.step();
    let (meeting, knowledge) = capture(&s).unwrap();
    assert_eq!(
        write_pajek(&meeting),
        "*Vertices 3\n1 \"0\"\n2 \"1\"\n3 \"2\"\n*Edges\n1 2 2\n1 3 2\n2 3 2\n"
    );
    assert_eq!(
        write_pajek(&knowledge),
        "*Vertices 3\n1 \"0\"\n2 \"1\"\n3 \"2\"\n*Arcs\n1 2\n1 3\n2 1\n2 3\n3 1\n3 2\n"
    );
}

#[test]
fn csv_golden_edge_lists() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = MeetingNetwork::new(3);
    m.add_meetings(2, 0, 5).unwrap();
    let mut k = KnowledgeNetwork::new(3);
    k.insert_arc(1, 0, ArcInfo { group: GroupId(1), timestamp: 7 }).unwrap();
    write_meeting_csv(&m, &dir.path().join("m.csv")).unwrap();
    write_knowledge_csv(&k, &dir.path().join("k.csv")).unwrap();
    assert_eq!(std::fs::read_to_string(dir.path().join("m.csv")).unwrap(), "a,b,weight\n0,2,5\n");
    assert_eq!(
        std::fs::read_to_string(dir.path().join("k.csv")).unwrap(),
        "i,j,group,timestamp\n1,0,1,7\n"
    );
}

#[test]
fn metrics_table_round_trip_from_a_run() {
    let cfg = SimConfig {
        n: 60,
        d_side: 12,
        oh: 1,
        max_ticks: 400,
        metrics_every: 7,
        seed: 3,
        ..SimConfig::default()
    };
    let out = run_simulation(&cfg, RunOptions::default(), &mut DiscardSnapshots).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("metrics.csv");
    write_metrics_csv(&out.rows, &path).unwrap();
    let header = std::fs::read_to_string(&path).unwrap();
    assert!(header.starts_with(
        "tick,mk,meeting_rate,K_dir,K_undir,Ps,Pb,PsG,PbG,delta_mk,Ps_meet,Pb_meet,PsG_meet,PbG_meet,arcs,edges\n"
    ));
    assert_eq!(read_metrics_csv(&path).unwrap(), out.rows);
}

#[test]
fn malformed_csv_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    std::fs::write(&path, "a,b,weight\n0,x,1\n").unwrap();
    assert!(read_meeting_csv(&path, 3).is_err());
    std::fs::write(&path, "a,b,weight\n0,9,1\n").unwrap();
    assert!(read_meeting_csv(&path, 3).is_err());
}
