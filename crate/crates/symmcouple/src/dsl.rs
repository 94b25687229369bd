//! Parsers for the `kind:key=value,...` spec strings.
//!
//! Keys that take a nested spec (`phi=`, `F=`, `weight=`) swallow the rest
//! of the string, so they must come last: `lorentz:p=2,phi=power:alpha=0.5`.
//! `from-file:` takes a path. Unknown kinds and keys are errors.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use symmcouple_core::constructs::build_phi_theorem6;
use symmcouple_core::{OrliczFunction, PhiFunction, Schedule, SpaceSpec, Weight};

use crate::csv_io;

const NESTED: [&str; 3] = ["phi", "F", "weight"];

struct Params<'a> {
    spec: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Params<'a> {
    fn take(&mut self, key: &str) -> Option<&'a str> {
        let i = self.pairs.iter().position(|(k, _)| *k == key)?;
        Some(self.pairs.remove(i).1)
    }

    fn num(&mut self, key: &str) -> Result<Option<f64>> {
        self.take(key).map(|v| number(v).with_context(|| format!("in `{}`", self.spec))).transpose()
    }

    fn req(&mut self, key: &str) -> Result<f64> {
        self.num(key)?.ok_or_else(|| anyhow!("`{}` needs `{key}=`", self.spec))
    }

    fn nested(&mut self, key: &str) -> Result<&'a str> {
        self.take(key).ok_or_else(|| anyhow!("`{}` needs `{key}=`", self.spec))
    }

    fn all(&mut self, key: &str) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        while let Some(v) = self.num(key)? {
            out.push(v);
        }
        Ok(out)
    }

    fn finish(self) -> Result<()> {
        match self.pairs.first() {
            Some((k, _)) => bail!("unknown key `{k}` in `{}`", self.spec),
            None => Ok(()),
        }
    }
}

fn split(spec: &str) -> Result<(&str, Params<'_>)> {
    let (kind, mut rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mut pairs = Vec::new();
    while !rest.is_empty() {
        let (key, after) = rest.split_once('=').ok_or_else(|| anyhow!("expected `key=value` in `{spec}`"))?;
        if key.is_empty() || key.contains(',') {
            bail!("malformed key `{key}` in `{spec}`");
        }
        if NESTED.contains(&key) {
            pairs.push((key, after));
            break;
        }
        let (value, next) = after.split_once(',').unwrap_or((after, ""));
        pairs.push((key, value));
        rest = next;
    }
    Ok((kind, Params { spec, pairs }))
}

/// A float, `inf`, or `2^k`.
pub fn number(s: &str) -> Result<f64> {
    if let Some(e) = s.strip_prefix("2^") {
        let k: f64 = e.parse().with_context(|| format!("bad exponent in `{s}`"))?;
        return Ok(k.exp2());
    }
    s.parse::<f64>().map_err(|_| anyhow!("`{s}` is not a number"))
}

fn file_path(spec: &str) -> Option<&Path> {
    spec.strip_prefix("from-file:").map(Path::new)
}

pub fn parse_phi(spec: &str) -> Result<PhiFunction> {
    if let Some(path) = file_path(spec) {
        let (ts, vs) = csv_io::read_columns_file(path, ["t", "phi"])?;
        return Ok(PhiFunction::tabulated(&ts, &vs)?);
    }
    let (kind, mut p) = split(spec)?;
    let phi = match kind {
        "power" => PhiFunction::power(p.req("alpha")?)?,
        "tlog" => PhiFunction::tlog(),
        "powerlog" => {
            let alpha = p.req("alpha")?;
            PhiFunction::power_log(alpha, p.all("q")?)?
        }
        "pthroot" => {
            let q = p.req("p")?;
            PhiFunction::pth_root(parse_phi(p.nested("phi")?)?, q)?
        }
        "dual" => PhiFunction::dual(parse_phi(p.nested("phi")?)?),
        "theorem6" => {
            let levels = p.num("levels")?.unwrap_or(40.0);
            let w = parse_weight(p.take("weight").unwrap_or("recip"), 30)?;
            build_phi_theorem6(&w, count(levels, "levels")?)?.phi
        }
        other => bail!("unknown function kind `{other}`"),
    };
    p.finish()?;
    Ok(phi)
}

pub fn parse_orlicz(spec: &str) -> Result<OrliczFunction> {
    if let Some(path) = file_path(spec) {
        let (us, fs) = csv_io::read_columns_file(path, ["u", "F"])?;
        return Ok(OrliczFunction::tabulated(&us, &fs)?);
    }
    let (kind, mut p) = split(spec)?;
    let f = match kind {
        "orlicz-power" => OrliczFunction::power(p.req("p")?)?,
        "orlicz-powerlog1" => OrliczFunction::power_log1(p.req("p")?)?,
        "orlicz-sinlog" => {
            let q = p.req("p")?;
            OrliczFunction::sin_log(q, p.req("c")?)?
        }
        "orlicz-from-phi" => OrliczFunction::from_phi(parse_phi(p.nested("phi")?)?)?,
        other => bail!("unknown Orlicz function kind `{other}`"),
    };
    p.finish()?;
    Ok(f)
}

pub fn parse_space(spec: &str) -> Result<SpaceSpec> {
    let (kind, mut p) = split(spec)?;
    let s = match kind {
        "lp" => SpaceSpec::lp(p.req("p")?)?,
        "lorentz" => {
            let q = p.req("p")?;
            SpaceSpec::lorentz(q, parse_phi(p.nested("phi")?)?)?
        }
        "lambda" => SpaceSpec::lambda(parse_phi(p.nested("phi")?)?)?,
        "marcinkiewicz" => SpaceSpec::marcinkiewicz(parse_phi(p.nested("phi")?)?)?,
        "orlicz" => SpaceSpec::orlicz(parse_orlicz(p.nested("F")?)?),
        other => bail!("unknown space kind `{other}`"),
    };
    p.finish()?;
    Ok(s)
}

/// `depth` is used when the spec does not set its own.
pub fn parse_weight(spec: &str, depth: u32) -> Result<Weight> {
    if let Some(path) = file_path(spec) {
        return Ok(Weight::new(csv_io::read_step_file(path)?)?);
    }
    let (kind, mut p) = split(spec)?;
    let depth = match p.num("depth")? {
        Some(d) => count(d, "depth")? as u32,
        None => depth,
    };
    let w = match kind {
        "recip" => Weight::recip(depth)?,
        "dyadic-geom" => Weight::dyadic_geom(p.num("q")?.unwrap_or(2.0), depth)?,
        "from-schedule" => {
            let n = p.num("n")?.map(|n| count(n, "n")).transpose()?.unwrap_or(depth as usize);
            let sched = match p.take("tau") {
                Some("pow2") => Schedule::Pow2,
                Some(first) => {
                    let mut taus = vec![number(first)?];
                    taus.extend(p.all("tau")?);
                    if taus.len() == 1 {
                        Schedule::constant(taus[0])?
                    } else {
                        Schedule::list(taus)?
                    }
                }
                None => bail!("`{spec}` needs `tau=`"),
            };
            Weight::from_schedule(&sched, n)?
        }
        other => bail!("unknown weight kind `{other}`"),
    };
    p.finish()?;
    Ok(w)
}

/// `pow2` for `τ(N) = 2^{-N}`, one number for a constant, or a
/// comma-separated non-increasing list.
pub fn parse_schedule(spec: &str) -> Result<Schedule> {
    if spec == "pow2" {
        return Ok(Schedule::Pow2);
    }
    let vals = spec.split(',').map(number).collect::<Result<Vec<_>>>()?;
    Ok(if vals.len() == 1 { Schedule::constant(vals[0])? } else { Schedule::list(vals)? })
}

fn count(v: f64, what: &str) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v < 1e9 {
        Ok(v as usize)
    } else {
        bail!("`{what}` must be a non-negative integer, got {v}")
    }
}
