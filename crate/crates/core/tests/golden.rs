//! Complex dumps and profiles of small hand-checked images, stored under
//! `tests/golden/` as `<name>.csv01` (input) and `<name>.txt` (profile line,
//! then one simplex per line).

use std::fs;
use std::path::Path;

use digitop::complex::enumerate_simplices;
use digitop::homology::betti_numbers;
use digitop::img::{binarize, load_image, Binarize, ImageFormat};

#[test]
fn golden_dumps_match() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut inputs: Vec<_> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv01"))
        .collect();
    inputs.sort();
    assert!(inputs.len() >= 5, "golden inputs missing from {}", dir.display());
    for input in inputs {
        let img = binarize(&load_image(&input, ImageFormat::Csv01).unwrap(), Binarize::default());
        let actual = format!("{}\n{}", betti_numbers(&img).unwrap(), enumerate_simplices(&img).dump());
        let expected = fs::read_to_string(input.with_extension("txt")).unwrap();
        assert_eq!(actual, expected, "{}", input.display());
    }
}
