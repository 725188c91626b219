//! Flat `key = value` configuration files for single Monte-Carlo cells.
//!
//! ```text
//! # tail study on Burr(1,1)
//! study = tail            # tail | mef
//! dist = burr             # burr | weibull | gpd
//! c = 1
//! ell = 1
//! n = 4096
//! replications = 1000     # optional, study default otherwise
//! base_seed = 7           # optional, 0 otherwise
//! target = hall_power     # hall_power | weibull_log | quantile | fixed
//! c1 = 1
//! estimators = pi, pt, al, pb
//! c3 = 0.5                # optional, law default otherwise
//! ```
//!
//! Law keys: `c`, `ell` (Burr), `kappa`, `C` (Weibull), `gamma`, `scale`
//! (GPD). Target keys: `c1` (hall_power), `c2` and `log_arg = n | log2n`
//! (weibull_log), `level` (quantile), `x` (fixed). Fractions such as `1/3`
//! are accepted wherever a number is expected. Unknown or repeated keys
//! are errors.

use std::collections::BTreeMap;

use crate::distributions::{BurrDist, Distribution, GpdDist, WeibullDist};
use crate::error::{Error, Result};
use crate::estimators::Estimator;
use crate::simulation::{LogArg, SimConfig, TargetRule};

const KEYS: &[&str] = &[
    "study",
    "dist",
    "c",
    "ell",
    "kappa",
    "C",
    "gamma",
    "scale",
    "n",
    "replications",
    "base_seed",
    "target",
    "c1",
    "c2",
    "log_arg",
    "level",
    "x",
    "c3",
    "estimators",
];

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

/// Parses a number, allowing a simple fraction `a/b`.
pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad number {s:?}")))?;
            let b: f64 = b
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad number {s:?}")))?;
            a / b
        }
        None => s
            .parse()
            .map_err(|_| Error::Config(format!("bad number {s:?}")))?,
    };
    if !v.is_finite() {
        return config_err(format!("number {s:?} is not finite"));
    }
    Ok(v)
}

struct Entries(BTreeMap<String, (usize, String)>);

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.0.remove(key)
    }

    fn required(&mut self, key: &str) -> Result<String> {
        self.take(key)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::Config(format!("missing key `{key}`")))
    }

    fn number(&mut self, key: &str) -> Result<f64> {
        let v = self.required(key)?;
        parse_number(&v).map_err(|e| Error::Config(format!("key `{key}`: {e}")))
    }

    fn opt_number(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            Some((line, v)) => parse_number(&v)
                .map(Some)
                .map_err(|e| Error::Config(format!("line {line}, key `{key}`: {e}"))),
            None => Ok(None),
        }
    }

    fn integer<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            Some((line, v)) => v.parse().map(Some).map_err(|_| {
                Error::Config(format!("line {line}: `{key}` needs an integer, got {v:?}"))
            }),
            None => Ok(None),
        }
    }
}

/// Parses a configuration text into a validated [`SimConfig`].
pub fn parse_config(text: &str) -> Result<SimConfig> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return config_err(format!("line {}: expected `key = value`", i + 1));
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return config_err(format!("line {}: unknown key `{k}`", i + 1));
        }
        if map.insert(k.to_string(), (i + 1, v.to_string())).is_some() {
            return config_err(format!("line {}: key `{k}` repeated", i + 1));
        }
    }
    let mut e = Entries(map);

    let dist: Distribution = match e.required("dist")?.to_ascii_lowercase().as_str() {
        "burr" => BurrDist::new(e.number("c")?, e.number("ell")?)?.into(),
        "weibull" => WeibullDist::new(e.number("C")?, e.number("kappa")?)?.into(),
        "gpd" => GpdDist::new(e.number("gamma")?, e.number("scale")?)?.into(),
        other => return config_err(format!("unknown law `{other}`")),
    };
    let target = match e.required("target")?.as_str() {
        "hall_power" => TargetRule::HallPower {
            c1: e.number("c1")?,
        },
        "weibull_log" => {
            let log_arg = match e.take("log_arg").map(|(_, v)| v).as_deref() {
                None | Some("n") => LogArg::SampleSize,
                Some("log2n") => LogArg::Log2SampleSize,
                Some(other) => {
                    return config_err(format!("log_arg must be n or log2n, got {other:?}"))
                }
            };
            TargetRule::WeibullLog {
                c2: e.number("c2")?,
                log_arg,
            }
        }
        "quantile" => TargetRule::Quantile {
            level: e.number("level")?,
        },
        "fixed" => TargetRule::Fixed { x: e.number("x")? },
        other => return config_err(format!("unknown target rule `{other}`")),
    };
    let n: usize = e
        .integer("n")?
        .ok_or_else(|| Error::Config("missing key `n`".into()))?;
    let estimators = e
        .required("estimators")?
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<Estimator>>>()?;
    let mut cfg = match e.required("study")?.as_str() {
        "tail" => SimConfig::tail(dist, n, target, estimators),
        "mef" => SimConfig::mef(dist, n, target, estimators),
        other => return config_err(format!("study must be tail or mef, got {other:?}")),
    };
    if let Some(r) = e.integer("replications")? {
        cfg.replications = r;
    }
    if let Some(s) = e.integer("base_seed")? {
        cfg.base_seed = s;
    }
    if let Some(c3) = e.opt_number("c3")? {
        cfg.c3 = c3;
    }
    if let Some((line, key)) = e.0.iter().next().map(|(k, (l, _))| (*l, k.clone())) {
        return config_err(format!(
            "line {line}: key `{key}` does not apply to this configuration"
        ));
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulation::Study;

    #[test]
    fn parses_a_burr_tail_cell() {
        let cfg = parse_config(
            "# comment\nstudy = tail\ndist = burr\nc = 1\nell = 1/2\nn = 256\n\
             target = hall_power\nc1 = 2\nestimators = pi, PT\nbase_seed = 9\n",
        )
        .unwrap();
        assert_eq!(cfg.study, Study::Tail);
        assert_eq!(cfg.n, 256);
        assert_eq!(cfg.replications, 1000);
        assert_eq!(cfg.base_seed, 9);
        assert_eq!(cfg.c3, 0.5);
        assert_eq!(cfg.estimators, vec![Estimator::Pi, Estimator::Pt]);
        assert_eq!(cfg.target, TargetRule::HallPower { c1: 2.0 });
        assert_eq!(cfg.label(), "Burr(1,1/2)");
    }

    #[test]
    fn parses_a_weibull_mef_cell() {
        let cfg = parse_config(
            "study=mef\ndist=weibull\nkappa=1\nC=1\nn=4096\ntarget=weibull_log\nc2=1/5\n\
             log_arg=log2n\nestimators=pt,al,pb\nreplications=10\n",
        )
        .unwrap();
        assert_eq!(cfg.replications, 10);
        assert_eq!(cfg.c3, 0.99);
        assert_eq!(
            cfg.target,
            TargetRule::WeibullLog {
                c2: 0.2,
                log_arg: LogArg::Log2SampleSize
            }
        );
    }

    #[test]
    fn rejects_bad_input() {
        let base =
            "study=tail\ndist=burr\nc=1\nell=1\nn=256\ntarget=hall_power\nc1=1\nestimators=pt\n";
        assert!(parse_config(base).is_ok());
        for extra in ["foo=1\n", "c=2\n", "kappa=1\n", "c3=1.5\n"] {
            let r = parse_config(&format!("{base}{extra}"));
            assert!(matches!(r, Err(Error::Config(_))), "{extra}: {r:?}");
        }
        assert!(parse_config(&base.replace("c1=1", "")).is_err());
        assert!(
            parse_config(&base.replace("target=hall_power", "target=weibull_log\nc2=1")).is_err()
        );
        assert!(parse_config("study tail").is_err());
    }

    #[test]
    fn fractions_parse() {
        assert_eq!(parse_number("1/3").unwrap(), 1.0 / 3.0);
        assert_eq!(parse_number(" 2.5 ").unwrap(), 2.5);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("abc").is_err());
    }
}
