//! Flattened float evaluator for symbol expressions.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use super::SymbolExpr;
use crate::error::{Error, Result};
use crate::scalar::{rational_to_f64, Coeff};
use crate::trigpoly::TrigPoly;

type Spectrum = Vec<(Vec<f64>, Complex64)>;

#[derive(Clone, Debug)]
struct CTerm {
    x: Spectrum,
    y: Option<Spectrum>,
    mono: Vec<i32>,
    /// `(m/2, λ²)`.
    brackets: Vec<(f64, Complex64)>,
    /// `(node index, power)`.
    recips: Vec<(usize, i32)>,
}

/// A symbol expression compiled to float data. Denominators are evaluated
/// once per point, in dependency order; the root is the last node.
#[derive(Clone, Debug)]
pub struct CompiledSymbol {
    dim: usize,
    nodes: Vec<Vec<CTerm>>,
}

fn spectrum<C: Coeff>(p: &TrigPoly<C>) -> Spectrum {
    p.terms()
        .iter()
        .map(|(xi, c)| (xi.to_f64(p.dim(), p.basis()), c.to_c64()))
        .collect()
}

fn eval_spectrum(s: &Spectrum, x: &[f64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (xi, c) in s {
        let dot: f64 = xi.iter().zip(x).map(|(a, b)| a * b).sum();
        if dot == 0.0 {
            acc += c;
        } else {
            acc += c * Complex64::from_polar(1.0, core::f64::consts::TAU * dot);
        }
    }
    acc
}

impl CompiledSymbol {
    pub fn new<C: Coeff>(e: &SymbolExpr<C>) -> Self {
        let mut nodes = Vec::new();
        let mut seen: Vec<(*const SymbolExpr<C>, usize)> = Vec::new();
        let root = compile_node(e, &mut nodes, &mut seen);
        nodes.push(root);
        CompiledSymbol { dim: e.dim(), nodes }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn denominator_count(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Value at `(x, y, ξ)`; symbols ignore `y`.
    pub fn eval(&self, x: &[f64], y: &[f64], xi: &[f64]) -> Result<Complex64> {
        let mut vals: Vec<Complex64> = Vec::with_capacity(self.nodes.len());
        let r2: f64 = xi.iter().map(|v| v * v).sum();
        let last = self.nodes.len() - 1;
        for (k, node) in self.nodes.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in node {
                let mut v = eval_spectrum(&t.x, x);
                if let Some(ys) = &t.y {
                    v *= eval_spectrum(ys, y);
                }
                for (i, &a) in t.mono.iter().enumerate() {
                    if a > 0 {
                        v *= Float::powi(xi[i], a);
                    }
                }
                for &(half, l2) in &t.brackets {
                    let base = Complex64::new(1.0, 0.0) + l2 * r2;
                    v *= if base.im == 0.0 && base.re > 0.0 {
                        Complex64::new(Float::powf(base.re, half), 0.0)
                    } else {
                        base.powf(half)
                    };
                }
                for &(j, p) in &t.recips {
                    v /= vals[j].powi(p);
                }
                acc += v;
            }
            if k < last && (acc.norm() == 0.0 || !acc.is_finite()) {
                return Err(Error::Domain {
                    x: x.to_vec(),
                    xi: xi.to_vec(),
                });
            }
            vals.push(acc);
        }
        let v = vals[last];
        if !v.is_finite() {
            return Err(Error::Domain {
                x: x.to_vec(),
                xi: xi.to_vec(),
            });
        }
        Ok(v)
    }
}

fn compile_node<C: Coeff>(
    e: &SymbolExpr<C>,
    nodes: &mut Vec<Vec<CTerm>>,
    seen: &mut Vec<(*const SymbolExpr<C>, usize)>,
) -> Vec<CTerm> {
    let mut out = Vec::with_capacity(e.terms().len());
    for t in e.terms() {
        let mut recips = Vec::with_capacity(t.recips.len());
        for r in &t.recips {
            let key = Arc::as_ptr(&r.den);
            let idx = match seen.iter().find(|(k, _)| *k == key) {
                Some(&(_, i)) => i,
                None => {
                    let node = compile_node(&r.den, nodes, seen);
                    nodes.push(node);
                    let i = nodes.len() - 1;
                    seen.push((key, i));
                    i
                }
            };
            recips.push((idx, r.power as i32));
        }
        out.push(CTerm {
            x: spectrum(&t.x),
            y: t.y.as_ref().map(spectrum),
            mono: t.mono.0.iter().map(|&a| a as i32).collect(),
            brackets: t
                .brackets
                .iter()
                .map(|b| (0.5 * rational_to_f64(&b.m), b.lambda2.to_c64()))
                .collect(),
            recips,
        });
    }
    out
}
