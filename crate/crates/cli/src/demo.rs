//! Named scenarios for `colombeau demo <name>`.

use crate::config::{Expressions, ScenarioConfig, Suite};

pub const DEMOS: [&str; 4] = [
    "delta-squared",
    "strict-inversion",
    "f-times-delta",
    "heaviside-power",
];

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn pair(a: &str, b: &str) -> [String; 2] {
    [a.into(), b.into()]
}

pub fn demo(name: &str) -> Option<ScenarioConfig> {
    let mut c = ScenarioConfig::default();
    match name {
        // moderate with a 1/eps^4 peak, yet not associated with anything smaller
        "delta-squared" => {
            c.suites = vec![Suite::Moderate, Suite::Negligible, Suite::Associated];
            c.expressions = Expressions {
                moderate: strings(&["iota(delta) * iota(delta)"]),
                not_negligible: strings(&["iota(delta) * iota(delta)"]),
                not_associated: vec![pair("iota(delta) * iota(delta)", "iota(delta)")],
                ..Expressions::default()
            };
        }
        "strict-inversion" => {
            c.suites = vec![Suite::FtProperties];
            c.fourier.properties = strings(&["i"]);
        }
        "f-times-delta" => {
            c.suites = vec![Suite::Moderate, Suite::Associated];
            c.expressions = Expressions {
                moderate: strings(&["sigma(gauss) * iota(delta)"]),
                associated: vec![pair("sigma(gauss) * iota(delta)", "iota(delta)")],
                ..Expressions::default()
            };
        }
        // H^2 ~ H although H^2 - H is not negligible
        "heaviside-power" => {
            c.suites = vec![Suite::Negligible, Suite::Associated];
            c.expressions = Expressions {
                not_negligible: strings(&["iota(heaviside) * iota(heaviside) - iota(heaviside)"]),
                associated: vec![pair("iota(heaviside) * iota(heaviside)", "iota(heaviside)")],
                ..Expressions::default()
            };
        }
        _ => return None,
    }
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_demo_validates() {
        for name in DEMOS {
            demo(name).unwrap().validate().unwrap();
        }
        assert!(demo("nope").is_none());
    }
}
