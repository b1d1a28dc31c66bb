//! Runs every example end to end.

macro_rules! example {
    ($name:ident, $path:literal) => {
        #[allow(dead_code)]
        #[path = $path]
        mod $name;

        #[test]
        fn $name() {
            $name::run_example().unwrap();
        }
    };
}

example!(q_numbers, "../examples/q_numbers.rs");
example!(tensor_appendix, "../examples/tensor_appendix.rs");
example!(basis_and_spectrum, "../examples/basis_and_spectrum.rs");
example!(fig1_svg, "../examples/fig1_svg.rs");
example!(reduced_elements, "../examples/reduced_elements.rs");
example!(build_operators, "../examples/build_operators.rs");
example!(angular_momentum, "../examples/angular_momentum.rs");
example!(verify_relations, "../examples/verify_relations.rs");
example!(heisenberg, "../examples/heisenberg.rs");
example!(lightcone_obstruction, "../examples/lightcone_obstruction.rs");
example!(classical_limit, "../examples/classical_limit.rs");
