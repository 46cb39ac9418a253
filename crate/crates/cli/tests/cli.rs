use kakeya::expander::count_prefixes;
use kakeya::{Rational, Sequence};
use kakeya_cli::run;
use serde_json::Value;

fn cli(args: &str) -> kakeya_cli::Outcome {
    run(std::iter::once("kakeya").chain(args.split_whitespace()))
}

fn json(args: &str) -> Value {
    let out = cli(&format!("{args} --format json"));
    assert_eq!(out.code, 0, "{args}: {}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

#[test]
fn s_const_rounds_to_three_decimals() {
    let v = json("s-const --width 1/1000");
    let lo: Rational = v["enclosure"]["lo"].as_str().unwrap().parse().unwrap();
    let hi: Rational = v["enclosure"]["hi"].as_str().unwrap().parse().unwrap();
    assert!(&hi - &lo <= Rational::frac(1, 1000));
    assert_eq!(v["decimal"], "3.360");
}

#[test]
fn greedy_half_over_fibonacci() {
    let v = json("expand greedy --seq fibonacci --x 1/2 --digits 10");
    assert_eq!(v["bits"], "0010000000");
    assert_eq!(v["residual"]["lo"], "0");
    assert_eq!(v["residual"]["hi"], "0");
}

#[test]
fn count_matches_library() {
    let v = json("count --seq geometric:3/2 --x 1 --depth 12");
    let seq = Sequence::new("geometric:3/2".parse().unwrap()).unwrap();
    let lib = count_prefixes(&seq, &"1".parse().unwrap(), 12, &Rational::frac(1, 1000)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 13);
    for (level, row) in rows.iter().enumerate() {
        assert_eq!(row["feasible"].as_u64().unwrap(), lib.at(level));
        assert_eq!(row["undecided"].as_u64().unwrap(), 0);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(cli("expand greedy --seq fibonacci --x S+1/100 --digits 5").code, 1);
    assert_eq!(cli("expand greedy --seq fibonacci --x -1/100 --digits 5").code, 1);
    assert_eq!(cli("count --seq fibonacci --x 1/2").code, 2);
    assert_eq!(cli("count --seq fibonacci --x 1/2 --depth 3 --bogus").code, 2);
    assert_eq!(cli("s-const --width 0").code, 2);
    assert_eq!(cli("count --seq custom:/nonexistent/file --x 1/2 --depth 3").code, 2);
    assert_eq!(cli("--help").code, 0);
}

#[test]
fn undecided_maps_to_three() {
    // T_2 = S − 2 = 1.35988566624..., about 4e-11 above x
    let args = "expand lazy --seq fibonacci --x 1.3598856662 --digits 2";
    let out = cli(&format!("{args} --cap 0"));
    assert_eq!(out.code, 3, "{out:?}");
    assert!(out.stderr.contains("digit 2"), "{}", out.stderr);
    let out = cli(args);
    assert_eq!(out.code, 0, "{out:?}");
    assert!(out.stdout.contains("bits: 00"));
}

#[test]
fn output_is_deterministic() {
    for args in ["enumerate --seq fibonacci --x 3/2 --count 5 --depth 12", "special --seq fibonacci --n 20"] {
        for format in ["json", "csv", "text"] {
            let a = cli(&format!("{args} --format {format}"));
            let b = cli(&format!("{args} --format {format}"));
            assert_eq!(a, b);
            assert_eq!(a.code, 0);
        }
    }
}

#[test]
fn csv_has_header_and_rows() {
    let out = cli("fib --from 1 --to 6 --format csv");
    assert_eq!(out.stdout, "n,F_n\n1,1\n2,1\n3,2\n4,3\n5,5\n6,8\n");
    let out = cli("freq --bits 0110 --format csv");
    assert_eq!(out.stdout, "field,value\nbits,0110\nones,2\nzeros,2\nratio,1/2\n");
}

#[test]
fn branch_plan_patterns() {
    let v = json("branch-plan --seq fibonacci --x 3/2 --m 3 --verify-depth 16");
    assert_eq!(v["special"], serde_json::json!([2, 4, 6]));
    assert_eq!(v["patterns_feasible"], 8);
}

#[test]
fn perturb_and_rho() {
    let v = json("perturb --seq perturbed-golden");
    assert_eq!(v["equality"], true);
    assert_eq!(v["ratio"], "-1/2+1/2*sqrt5");
    assert_eq!(json("rho --seq geometric:17/10")["holds"], false);
    assert_eq!(json("rho --seq geometric:8/5")["holds"], true);
}
