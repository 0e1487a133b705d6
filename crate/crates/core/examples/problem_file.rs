//! Problems as JSON documents: parse, validate, and write back.

use coderiv::problem::{parse_problem, to_document_string, validate};

const DOC: &str = r#"{
  "name": "segment",
  "dims": {"p": 1, "x": 1, "y": 2},
  "cone": {"generators": [[1, 0], [0, 1]]},
  "objective": {"kind": "affine", "fp": [["0"], ["1"]], "fx": [["1"], ["-1"]], "c": ["0", "1/2"]},
  "constraints": {"kind": "affine", "rows": [
    {"ap": ["1"], "ax": ["-1"], "b": "0", "rel": "<="},
    {"ap": ["0"], "ax": ["1"], "b": "-1", "rel": "<="}
  ]},
  "base_point": {"p": ["0"], "x": ["0"]}
}"#;

fn main() {
    let pr = match parse_problem(DOC) {
        Ok(pr) => pr,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    };
    let report = validate(&pr);
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    let text = to_document_string(&pr);
    println!("round trip equal: {}", parse_problem(&text).unwrap() == pr);
}
