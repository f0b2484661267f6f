use proptest::prelude::*;
use uiwd_core::{
    allocation_cost, apply_policy, budget_residual, closure_tolerance, mrijs_from_sum, AgentState,
    AllocationPolicy, AllocationVector, FactorId, PeriodContext, RecursionCoefficients,
    SubstitutionRates, UnitPrices, Wealth,
};

fn prices() -> impl Strategy<Value = UnitPrices> {
    prop::array::uniform6(0.01f64..100.0).prop_map(UnitPrices)
}

fn quantities() -> impl Strategy<Value = AllocationVector> {
    prop::array::uniform6(-1e3f64..1e3).prop_map(AllocationVector)
}

fn policy() -> impl Strategy<Value = AllocationPolicy> {
    (
        prop::array::uniform6(0.01f64..1.0),
        prop::array::uniform6(0.0f64..=1.0),
        0.0f64..5.0,
        prop::array::uniform6(0.0f64..4.0),
    )
        .prop_map(|(raw, pers, regret_weight, curvature)| {
            let sum: f64 = raw.iter().sum();
            let mut persistence = RecursionCoefficients::uniform(0.0);
            for f in FactorId::ALL {
                persistence.set(f, pers[f.index()]);
            }
            AllocationPolicy {
                base_weights: raw.map(|b| b / sum),
                persistence,
                regret_weight,
                curvature,
                signed: false,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn policy_output_is_budget_closed(
        pol in policy(),
        p in prices(),
        prior in prop::array::uniform6(0.0f64..500.0),
        regret in 0.0f64..10.0,
        total in 1.0f64..1e6,
        frac in 0.0f64..=1.0,
    ) {
        let w = total * frac;
        let state = AgentState {
            prior_alloc: AllocationVector(prior),
            regret_memory: regret,
            ..AgentState::initial(Wealth::new(total, total, w), p)
        };
        let ctx = PeriodContext::new(p, w);
        let q = apply_policy(&pol, &state, &ctx).unwrap();
        prop_assert!(q.as_array().iter().all(|x| *x >= 0.0));
        prop_assert!((allocation_cost(&q, &p) - w).abs() <= closure_tolerance(w));
    }

    #[test]
    fn residual_solve_closes_the_budget(
        q in quantities(), p in prices(), w in -1e4f64..1e4, k in 0usize..6,
    ) {
        let target = FactorId::ALL[k];
        let solved = budget_residual(target, w, &p, &q).unwrap();
        let closed = q.with(target, solved);
        let cost = allocation_cost(&closed, &p);
        prop_assert!((cost - w).abs() <= 1e-12 * (1.0 + w.abs()).max(q.as_array().iter().zip(p.as_array()).map(|(a, b)| (a * b).abs()).sum()));
    }

    #[test]
    fn unit_prices_cost_is_quantity_sum(q in quantities()) {
        let sum: f64 = q.as_array().iter().sum();
        prop_assert_eq!(allocation_cost(&q, &UnitPrices::splat(1.0)), sum);
    }

    #[test]
    fn mrijs_stays_in_unit_interval(rates in prop::array::uniform6(-50.0f64..50.0)) {
        let r = SubstitutionRates::from_factor_rates(rates);
        let sum: f64 = rates.iter().sum();
        prop_assert!(r.mrijs > 0.0 && r.mrijs <= 1.0);
        prop_assert!((r.mrijs - (-sum).min(0.0).exp()).abs() <= 1e-12);
        prop_assert_eq!(r.mrijs, mrijs_from_sum(r.sum()));
    }
}

#[test]
fn mrijs_analytic_cases() {
    assert_eq!(mrijs_from_sum(0.0), 1.0);
    assert_eq!(mrijs_from_sum(2f64.ln()), 0.5);
    assert_eq!(mrijs_from_sum(-3.0), 1.0);
}
