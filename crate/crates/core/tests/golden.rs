mod common;

use remr_core::analysis::{analyze_plan, evaluate};
use remr_core::pathset::SearchLimits;
use remr_core::reliability::{event_probability, exact_reliability};
use remr_core::timing::{data_sizes, total_time, Latency};
use remr_core::{parse_scenario, render_scenario, StateVector};

use common::golden;

#[test]
fn structure_counts() {
    let s = golden();
    let summary = s.summary();
    assert_eq!(
        (
            summary.plans,
            summary.branches,
            summary.nodes,
            summary.sinks
        ),
        (3, 10, 8, 1)
    );
    let chains = s.chains();
    let dims: Vec<_> = chains
        .iter()
        .map(|c| (c.branch_count(), c.compute_count()))
        .collect();
    assert_eq!(dims, vec![(4, 3), (3, 3), (3, 3)]);
}

#[test]
fn plan_a_data_sizes() {
    let s = golden();
    let chain = s.chain(s.plan("a").unwrap());
    let sizes = data_sizes(&chain, 15.0);
    let expect = [12.0, 14.4, 14.4, 0.144];
    assert_eq!(sizes.outputs.len(), expect.len());
    for (got, want) in sizes.outputs.iter().zip(expect) {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}

#[test]
fn listed_vector_probability() {
    let s = golden();
    let chain = s.chain(s.plan("a").unwrap());
    let v = StateVector::new(vec![2, 3, 4, 1], vec![5, 1, 6]);
    let p = event_probability(&v, &chain);
    let want = 0.95 * 0.94 * 0.93 * 0.97 * 0.27 * 1.0 * 0.07;
    assert!((p - want).abs() < 1e-12);
    assert!((p - 0.01523).abs() < 5e-6);
}

#[test]
fn listed_vector_timing() {
    let s = golden();
    let chain = s.chain(s.plan("a").unwrap());
    let v = StateVector::new(vec![2, 3, 4, 1], vec![5, 1, 6]);
    let t = total_time(&chain, 15.0, &v).unwrap();
    // 5 + (6 + 5 + 4 + 1) + (3 + 12 + 2.4)
    assert_eq!(t.lead, 5.0);
    assert_eq!(t.transmission, Latency::Finite(16.0));
    assert!((t.total.finite().unwrap() - 38.4).abs() < 1e-9);
}

#[test]
fn round_trip() {
    let s = golden();
    assert_eq!(parse_scenario(&render_scenario(&s)).unwrap(), s);
}

#[test]
fn counts_and_values_at_defaults() {
    let s = golden();
    let limits = SearchLimits::default();
    let got: Vec<_> = s
        .chains()
        .iter()
        .map(|c| {
            let (p, _) = analyze_plan(c, 15.0, 25.0, limits).unwrap();
            (p.feasible_count, p.msv_count)
        })
        .collect();
    assert_eq!(got, vec![(3, 1), (60, 5), (543, 34)]);

    let report = evaluate(&s, 15.0, 25.0, limits).unwrap();
    for (chain, plan) in s.chains().iter().zip(&report.per_plan) {
        let exact = exact_reliability(chain, 15.0, 25.0, limits).unwrap();
        assert!((exact - plan.reliability).abs() < 1e-9);
    }
    let frozen = [2.7e-4, 0.07703, 0.56142];
    for (plan, want) in report.per_plan.iter().zip(frozen) {
        assert!(
            (plan.reliability - want).abs() < 5e-6,
            "{}: {}",
            plan.plan,
            plan.reliability
        );
    }
}
