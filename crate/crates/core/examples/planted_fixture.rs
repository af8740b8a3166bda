//! Writes one seeded planted-anomaly trial as a `site,count` CSV.
//!
//! ```text
//! cargo run -p benford-core --example planted_fixture > planted_n12.csv
//! ```
//!
//! Background: log-uniform over 4 decades; 2 of the 12 sites replaced by
//! uniform[1, 1000] draws; seed 11, trial 0. The planted ids go to stderr.

use benford_core::{generate_planted_trial, Sampler, SamplerSpec};

fn main() {
    let background = SamplerSpec::new(
        Sampler::LogUniform {
            orders_of_magnitude: 4,
        },
        11,
    );
    let outliers = SamplerSpec::new(
        Sampler::Uniform {
            low: 1.0,
            high: 1000.0,
        },
        11,
    );
    let (f, planted) = generate_planted_trial(&background, 12, 2, &outliers, 0).unwrap();
    println!("site,count");
    for site in f.sites() {
        println!("{},{}", site.id, site.count);
    }
    eprintln!("planted: {}", planted.join(","));
}
