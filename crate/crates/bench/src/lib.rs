//! Benchmark fixtures shared by the criterion targets.

use qtoric::model::{GitPresentation, ModelFile};

pub fn presentation(name: &str, charges: &[Vec<i64>], theta: &[i64]) -> GitPresentation {
    GitPresentation::from_file(&ModelFile {
        name: name.into(),
        n_rays: charges[0].len(),
        rank: charges.len(),
        charges: charges.to_vec(),
        theta: theta.to_vec(),
        ray_names: None,
    })
    .expect("benchmark model must be valid")
}

pub fn local_p2() -> GitPresentation {
    presentation("local_p2", &[vec![1, 1, 1, -3]], &[1])
}

pub fn p4() -> GitPresentation {
    presentation("p4", &[vec![1, 1, 1, 1, 1]], &[1])
}

pub fn hirzebruch() -> GitPresentation {
    presentation("f1", &[vec![1, 1, 0, -1], vec![0, 0, 1, 1]], &[1, 1])
}
