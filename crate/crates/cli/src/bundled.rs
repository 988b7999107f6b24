//! Experiment configs shipped inside the binary.

pub const CONFIGS: &[(&str, &str)] = &[
    ("table1_gaussian", include_str!("../configs/table1_gaussian.toml")),
    ("table1_power_sigma1", include_str!("../configs/table1_power_sigma1.toml")),
    ("table1_power_sigma2", include_str!("../configs/table1_power_sigma2.toml")),
    ("table1_shifted", include_str!("../configs/table1_shifted.toml")),
    ("table2", include_str!("../configs/table2.toml")),
    ("table3_gamma", include_str!("../configs/table3_gamma.toml")),
    ("table3_uniform", include_str!("../configs/table3_uniform.toml")),
    ("figure1_sweep", include_str!("../configs/figure1_sweep.toml")),
    ("figure2_sigma1_gaussian", include_str!("../configs/figure2_sigma1_gaussian.toml")),
    ("figure2_sigma1_gamma", include_str!("../configs/figure2_sigma1_gamma.toml")),
    ("figure2_sigma1_uniform", include_str!("../configs/figure2_sigma1_uniform.toml")),
    ("figure2_sigma2_gaussian", include_str!("../configs/figure2_sigma2_gaussian.toml")),
    ("figure2_sigma2_gamma", include_str!("../configs/figure2_sigma2_gamma.toml")),
    ("figure2_sigma2_uniform", include_str!("../configs/figure2_sigma2_uniform.toml")),
];

pub fn lookup(name: &str) -> Option<&'static str> {
    CONFIGS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    CONFIGS.iter().map(|(n, _)| *n)
}
