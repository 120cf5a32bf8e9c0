macro_rules! example_test {
    ($module:ident, $test:ident, $file:literal) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example_test!(dp_value, dp_value_example_runs, "dp_value.rs");
example_test!(two_state, two_state_example_runs, "two_state.rs");
example_test!(
    adaptive_regret,
    adaptive_regret_example_runs,
    "adaptive_regret.rs"
);
example_test!(pde_limit, pde_limit_example_runs, "pde_limit.rs");
example_test!(convergence, convergence_example_runs, "convergence.rs");
example_test!(
    policy_simulation,
    policy_simulation_example_runs,
    "policy_simulation.rs"
);
