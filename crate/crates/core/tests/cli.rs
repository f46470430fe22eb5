use std::process::{Command, Output};

fn cubecf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubecf"))
        .args(args)
        .output()
        .expect("run cubecf")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn cf_prints_convergents() {
    let o = cubecf(&["cf", "--n-max", "5"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "n,b_n,p_n,q_n\n0,0,0,1\n1,3,1,3\n2,1,1,4\n3,5,6,23\n4,1,7,27\n5,1,13,50\n"
    );
}

#[test]
fn cf_smallest_and_oracle() {
    let o = cubecf(&["cf", "--n-max", "1"]);
    assert_eq!(stdout(&o).lines().count(), 3);
    let o = cubecf(&["cf", "--n-max", "300", "--oracle"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("oracle agrees"));
}

#[test]
fn cf_rejects_zero_terms() {
    assert_eq!(cubecf(&["cf", "--n-max", "0"]).status.code(), Some(2));
}

#[test]
fn coefficient_rows_and_single_row() {
    let o = cubecf(&["table1"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 7);
    assert!(s.contains("1251,4813,11,-7,-9,0,0.280405"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("appropriate j = 11"));
    let o = cubecf(&[
        "table1", "--p", "13", "--q", "50", "--j-lo", "5", "--j-hi", "5",
    ]);
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn svp_trace_and_smallest_index() {
    let o = cubecf(&["svp", "--j", "7"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 7);
    assert!(s.ends_with("6,-3,-11,-3,-7,1,0,139,10,0\n"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("59/227"));
    assert!(cubecf(&["svp", "--j", "2"]).status.success());
    assert_eq!(cubecf(&["svp", "--j", "1"]).status.code(), Some(2));
}

#[test]
fn svp_scan_counts_misses() {
    let o = cubecf(&["svp", "--j-lo", "2", "--j-hi", "100", "--jobs", "2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("j,a_len,proven,is_convergent,p,q,Delta,b_bound\n"));
    let misses = s
        .lines()
        .skip(1)
        .filter(|l| l.split(',').nth(3) == Some("false"))
        .count();
    assert_eq!(misses, 3);
}

#[test]
fn kuzmin_scan_csv() {
    let o = cubecf(&[
        "kuzmin",
        "--n-samples",
        "2000",
        "--r-min",
        "2",
        "--r-max",
        "11",
    ]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 11);
    assert!(s.starts_with("df,R,X2,p_value\n1,2,"));
    assert_eq!(cubecf(&["kuzmin", "--r-min", "1"]).status.code(), Some(2));
}

#[test]
fn constants_verb() {
    let o = cubecf(&["constants"]);
    let s = stdout(&o);
    assert!(s.contains("theta_deg,146.200967"));
    assert!(s.contains("M,0.048113"));
    assert!(s.contains("H_x_prime,3.142064"));
}

#[test]
fn selfcheck_passes() {
    let o = cubecf(&["selfcheck", "--length-prefix", "100"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn output_file_and_pretty_format() {
    let dir = std::env::temp_dir().join(format!("cubecf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cf.csv");
    let o = cubecf(&["cf", "--n-max", "3", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 5);
    let o = cubecf(&["cf", "--n-max", "3", "--format", "pretty"]);
    assert!(stdout(&o).starts_with("n  b_n  p_n  q_n\n"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn deterministic_output() {
    let a = stdout(&cubecf(&[
        "svp", "--j-lo", "2", "--j-hi", "60", "--jobs", "1",
    ]));
    let b = stdout(&cubecf(&[
        "svp", "--j-lo", "2", "--j-hi", "60", "--jobs", "3",
    ]));
    assert_eq!(a, b);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(cubecf(&["nonsense"]).status.code(), Some(2));
    assert_eq!(cubecf(&["cf", "--precision", "5"]).status.code(), Some(2));
    assert_eq!(
        cubecf(&["svp", "--j", "7", "--j-lo", "3"]).status.code(),
        Some(2)
    );
}
