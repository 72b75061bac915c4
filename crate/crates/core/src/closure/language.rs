use std::sync::Arc;

use num_traits::Signed;
use serde::Serialize;

use crate::error::Result;
use crate::gps::{Gps, Kind};
use crate::order::{Monomial, MonomialGroup};
use crate::rational::{self, Rational};
use crate::rps::{from_gps, Rps};

/// Closure properties assumed of a language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub reindex: bool,
    pub ring: bool,
    pub renorm_derivative: bool,
    pub partial_truncation: bool,
    pub blowups: bool,
}

impl Flags {
    pub fn all() -> Flags {
        Flags {
            reindex: true,
            ring: true,
            renorm_derivative: true,
            partial_truncation: true,
            blowups: true,
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        for (on, name) in [
            (self.reindex, "reindex"),
            (self.ring, "ring"),
            (self.renorm_derivative, "renorm"),
            (self.partial_truncation, "partial"),
            (self.blowups, "blowups"),
        ] {
            if on {
                v.push(name);
            }
        }
        v
    }

    pub fn set(&mut self, name: &str, on: bool) -> bool {
        let slot = match name {
            "reindex" => &mut self.reindex,
            "ring" => &mut self.ring,
            "renorm" => &mut self.renorm_derivative,
            "partial" => &mut self.partial_truncation,
            "blowups" => &mut self.blowups,
            _ => return false,
        };
        *slot = on;
        true
    }
}

/// A family of generalized power series given by generators and the closure
/// properties it is declared to have.
#[derive(Clone, Debug)]
pub struct LanguageF {
    pub generators: Vec<(String, Gps)>,
    pub flags: Flags,
    /// Whether membership extends by right-composition with blow-up polynomials.
    pub blown_up: bool,
}

impl LanguageF {
    pub fn new(generators: Vec<(String, Gps)>, flags: Flags) -> LanguageF {
        LanguageF {
            generators,
            flags,
            blown_up: false,
        }
    }

    /// Geometric and binomial families, closed under everything.
    pub fn standard() -> Result<LanguageF> {
        Ok(LanguageF::new(
            vec![
                ("geom".into(), Gps::geometric("x")?),
                ("sqrt1p".into(), Gps::binomial(rational::ratio(1, 2), "x")?),
            ],
            Flags::all(),
        ))
    }

    /// Truncation-closure needs both partial truncations and renormalized
    /// derivatives on top of the ring operations.
    pub fn almost_fine(&self) -> bool {
        self.flags.ring && self.flags.partial_truncation && self.flags.renorm_derivative
    }

    pub fn fine(&self) -> bool {
        self.almost_fine() && self.flags.blowups
    }

    /// Structural membership of `f` in the closure of the generators.
    pub fn contains(&self, f: &Gps) -> bool {
        let fl = &self.flags;
        if self.generators.iter().any(|(_, g)| g.key() == f.key()) {
            return true;
        }
        match f.kind() {
            Kind::Finite(p) => fl.ring && p.keys().all(|e| e.values().all(rational::is_natural)),
            Kind::Geometric(_) => {
                fl.reindex && self.generators.iter().any(|(_, g)| matches!(g.kind(), Kind::Geometric(_)))
            }
            Kind::Binomial(l, _) => {
                fl.reindex
                    && self
                        .generators
                        .iter()
                        .any(|(_, g)| matches!(g.kind(), Kind::Binomial(m, _) if m == l))
            }
            Kind::Sum(cs) => fl.ring && cs.iter().all(|c| self.contains(c)),
            Kind::Product(a, b) => fl.ring && self.contains(a) && self.contains(b),
            Kind::Scale(_, a) => fl.ring && self.contains(a),
            Kind::Reindex(a, _) => fl.reindex && self.contains(a),
            Kind::RenormDerivative(a, _) => fl.renorm_derivative && self.contains(a),
            Kind::Fragment(a, _) => fl.partial_truncation && self.contains(a),
            Kind::BlowupAffine { f, .. } | Kind::BlowupMult { f, .. } => {
                (self.blown_up || fl.blowups) && self.contains(f)
            }
            Kind::ComposePcomp { f, g, nf, .. } => {
                self.blown_up
                    && self.contains(f)
                    && nf.k.is_positive()
                    && matches!(g.kind(), Kind::Finite(p) if p.values().all(|c| c.is_positive())
                        && p.keys().all(|e| e.values().all(rational::is_natural)))
            }
            Kind::ComposeClassical { f, g, .. } => fl.ring && self.contains(f) && self.contains(g),
            Kind::Derivative(..) | Kind::MonomialDivide(..) | Kind::MonomialMultiply(..) => false,
        }
    }
}

/// The language extended by right-composition with p-composable polynomials
/// with positive coefficients, built from the blow-ups `z0(k + z1)`.
pub fn make_fb(f: &LanguageF) -> LanguageF {
    LanguageF {
        generators: f.generators.clone(),
        flags: f.flags,
        blown_up: true,
    }
}

/// One instantiation of a generator at a monomial point.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub point: Vec<(String, Rational, Monomial)>,
    pub series: Rps,
}

/// Instantiates every unary generator at each `(a, m)`, giving restricted
/// series in the offset `ε` of `x = m(a + ε)`.
pub fn make_fm(
    f: &LanguageF,
    group: &Arc<MonomialGroup>,
    points: &[(Rational, Monomial)],
) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for (name, g) in &f.generators {
        for (a, m) in points {
            let point: Vec<(String, Rational, Monomial)> =
                g.vars().iter().map(|v| (v.clone(), a.clone(), m.clone())).collect();
            let series = from_gps(g, group, &point)?;
            out.push(Instance {
                name: format!("{name}@{}*({}+e)", m, rational::fmt(a)),
                point,
                series,
            });
        }
    }
    Ok(out)
}
