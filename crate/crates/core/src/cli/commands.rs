use rayon::prelude::*;
use serde_json::{json, Value};

use super::output::{Cell, Document, Table};
use super::{load_config, Cli, CliError, Command, SimulateArgs};
use crate::geometry::{Dimension, SensorConfig, SolutionSet, Vec2, Vec3};
use crate::kummer::quartic_normalized;
use crate::kummer::{
    conic_arc, gaussian_curvature, homogeneous_form, hull_boundary_classify, nodes_and_tropes, q3_loci, q3_plane,
    squared_quadric_coeffs, HullComponent, Locus, NodeKind, Q3Report, Q3Verdict, Side, TPlane,
};
use crate::params::{abc_from_config, cayley_residual, config_from_param, ParamPoint};
use crate::sim::{gen_noisy_toa, NoiseSpec};
use crate::tdoa::{
    classify_tau, ellipse_residual, invert_tdoa, invert_tdoa_collinear, BoundaryId, Fiber, P2Report, P2Verdict,
    PseudorangePair, TauLabel,
};
use crate::toa2::{classify2, invert2, Q2Class, Q2Facet, Q2Verdict, RangePair};
use crate::toa3::{
    classify3, compatibility_residual, forward3, invert3, invert3_collinear, Feasibility, FeasibilityReport,
    RangeTriple,
};
use crate::toa3d::{
    classify3d_r2, classify3d_r3, invert3d_r2, invert3d_r3, invert3d_r3_collinear, SolidVerdict, SolutionSet3D,
};

type Res<T> = std::result::Result<T, CliError>;

pub(super) fn execute(cli: &Cli) -> Res<Document> {
    let config = || -> Res<SensorConfig> {
        let src = cli.config.as_deref().ok_or_else(|| CliError::usage("--config is required"))?;
        load_config(src)
    };
    match &cli.command {
        Command::LocalizeToa { toa } => localize_toa(&config()?, &toa.0),
        Command::LocalizeTdoa { tdoa } => localize_tdoa(&config()?, &tdoa.0),
        Command::Classify(a) => match (&a.toa, &a.tdoa) {
            (Some(t), _) => classify_toa(&config()?, &t.0),
            (None, Some(t)) => classify_tdoa(&config()?, &t.0),
            (None, None) => Err(CliError::usage("one of --toa or --tdoa is required")),
        },
        Command::SurfaceSample { range, resolution } => surface_sample(&config()?, *range, *resolution as usize),
        Command::Features => features(&config()?),
        Command::Params { abc } => match abc {
            Some(v) => params_to_triangle(&v.0),
            None => params_from_config(&config()?),
        },
        Command::Simulate(a) => simulate(&config()?, a),
    }
}

fn num(v: f64) -> Value {
    Value::from(v)
}

fn v2(p: Vec2) -> Value {
    json!([num(p.x), num(p.y)])
}

fn v3(p: Vec3) -> Value {
    json!([num(p.x), num(p.y), num(p.z)])
}

fn plane_json(p: &TPlane) -> Value {
    json!({ "normal": p.normal.map(num), "offset": num(p.offset) })
}

fn expect_len(v: &[f64], n: usize, what: &str) -> Res<()> {
    if v.len() != n {
        return Err(CliError::usage(format!("{what} needs {n} values, got {}", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(CliError::usage(format!("{what} values must be finite")));
    }
    Ok(())
}

fn planar_solutions(command: &str, config: &SensorConfig, sol: SolutionSet) -> Document {
    let pts = sol.points();
    let mut table = Table::new(&["x", "y"]);
    table.rows = pts.iter().map(|p| vec![Cell::Num(p.x), Cell::Num(p.y)]).collect();
    Document {
        json: json!({
            "command": command,
            "class": config.class().name(),
            "fiber": pts.len(),
            "solutions": pts.iter().map(|p| v2(*p)).collect::<Vec<_>>(),
        }),
        table: Some(table),
    }
}

fn spatial_solutions(config: &SensorConfig, sol: SolutionSet3D) -> Document {
    if let SolutionSet3D::Circle { center, radius, axis, u, v } = sol {
        let mut table = Table::new(&["center_x", "center_y", "center_z", "radius", "axis_x", "axis_y", "axis_z"]);
        table.rows.push([center.x, center.y, center.z, radius, axis.x, axis.y, axis.z].map(Cell::Num).to_vec());
        return Document {
            json: json!({
                "command": "localize-toa",
                "class": config.class().name(),
                "fiber": "circle",
                "solutions": [],
                "circle": { "center": v3(center), "radius": num(radius), "axis": v3(axis), "u": v3(u), "v": v3(v) },
            }),
            table: Some(table),
        };
    }
    let pts = sol.sample(0);
    let mut table = Table::new(&["x", "y", "z"]);
    table.rows = pts.iter().map(|p| vec![Cell::Num(p.x), Cell::Num(p.y), Cell::Num(p.z)]).collect();
    Document {
        json: json!({
            "command": "localize-toa",
            "class": config.class().name(),
            "fiber": pts.len(),
            "solutions": pts.iter().map(|p| v3(*p)).collect::<Vec<_>>(),
        }),
        table: Some(table),
    }
}

fn localize_toa(config: &SensorConfig, toa: &[f64]) -> Res<Document> {
    expect_len(toa, config.len(), "--toa")?;
    Ok(match (config.dimension(), toa.len()) {
        (Dimension::Two, 2) => {
            planar_solutions("localize-toa", config, invert2(config, RangePair::new(toa[0], toa[1]))?)
        }
        (Dimension::Two, _) => {
            let t = RangeTriple::new(toa[0], toa[1], toa[2]);
            let sol = if config.is_collinear() { invert3_collinear(config, t)? } else { invert3(config, t)? };
            planar_solutions("localize-toa", config, sol)
        }
        (Dimension::Three, 2) => spatial_solutions(config, invert3d_r2(config, RangePair::new(toa[0], toa[1]))?),
        (Dimension::Three, _) => {
            let t = RangeTriple::new(toa[0], toa[1], toa[2]);
            let sol = if config.is_collinear() { invert3d_r3_collinear(config, t)? } else { invert3d_r3(config, t)? };
            spatial_solutions(config, sol)
        }
    })
}

fn localize_tdoa(config: &SensorConfig, tdoa: &[f64]) -> Res<Document> {
    expect_len(tdoa, 2, "--tdoa")?;
    config.planar_triple()?;
    let tau = PseudorangePair::new(tdoa[0], tdoa[1]);
    let sol = if config.is_collinear() { invert_tdoa_collinear(config, tau)? } else { invert_tdoa(config, tau)? };
    Ok(planar_solutions("localize-tdoa", config, sol))
}

fn q2_json(c: &Q2Class) -> Value {
    let (verdict, on) = match &c.verdict {
        Q2Verdict::Interior => ("Interior", vec![]),
        Q2Verdict::Boundary(f) => ("Boundary", f.iter().map(|x| x.name()).collect()),
        Q2Verdict::Outside => ("Outside", vec![]),
    };
    let residuals: serde_json::Map<String, Value> =
        Q2Facet::ALL.iter().zip(c.residuals).map(|(f, r)| (f.name().to_string(), num(r))).collect();
    json!({ "verdict": verdict, "on_facets": on, "residuals": residuals })
}

fn q3_json(r: &Q3Report) -> Value {
    let (verdict, on): (&str, Vec<String>) = match &r.verdict {
        Q3Verdict::Interior => ("Interior", vec![]),
        Q3Verdict::OnFacet(l) => ("OnFacet", l.iter().map(|x| x.to_string()).collect()),
        Q3Verdict::Outside => ("Outside", vec![]),
    };
    json!({
        "verdict": verdict,
        "on_facets": on,
        "min_residual": num(r.min_residual()),
        "facets": r.facets.iter().map(|f| json!({ "locus": f.locus.to_string(), "residual": num(f.residual) })).collect::<Vec<_>>(),
    })
}

fn feasibility_json(config: &SensorConfig, t: RangeTriple, r: &FeasibilityReport) -> Res<Value> {
    let (verdict, reason) = match r.verdict {
        Feasibility::Feasible { .. } => ("Feasible", Value::Null),
        Feasibility::Infeasible(why) => ("Infeasible", Value::from(why.name())),
    };
    let mut v = json!({
        "command": "classify",
        "class": config.class().name(),
        "verdict": verdict,
        "reason": reason,
        "fiber": r.fiber(),
        "in_first_octant": r.in_octant,
        "surface_residual_raw": num(r.surface_residual_raw),
        "surface_residual": num(r.surface_residual),
        "q3": q3_json(&r.q3),
    });
    if config.is_collinear() {
        v["compatibility_residual"] = num(compatibility_residual(config, t)?);
    } else {
        v["quartic_residual"] = num(r.surface_residual_raw);
        v["hull_component"] = match hull_boundary_classify(config, t) {
            Ok(h) => json!({ "name": h.to_string(), "in_hull": h.in_hull() }),
            Err(_) => Value::Null,
        };
    }
    Ok(v)
}

fn classify_toa(config: &SensorConfig, toa: &[f64]) -> Res<Document> {
    expect_len(toa, config.len(), "--toa")?;
    let json = match (config.dimension(), toa.len()) {
        (Dimension::Two, 2) => {
            let c = classify2(config, RangePair::new(toa[0], toa[1]))?;
            let mut v = q2_json(&c);
            v["command"] = "classify".into();
            v["class"] = config.class().name().into();
            v["fiber"] = c.fiber().into();
            v
        }
        (Dimension::Two, _) => {
            let t = RangeTriple::new(toa[0], toa[1], toa[2]);
            feasibility_json(config, t, &classify3(config, t)?)?
        }
        (Dimension::Three, 2) => {
            let (verdict, fiber): (&str, Value) = match classify3d_r2(config, RangePair::new(toa[0], toa[1]))? {
                Q2Verdict::Interior => ("Interior", "circle".into()),
                Q2Verdict::Boundary(_) => ("Boundary", 1.into()),
                Q2Verdict::Outside => ("Outside", 0.into()),
            };
            json!({ "command": "classify", "class": config.class().name(), "verdict": verdict, "fiber": fiber })
        }
        (Dimension::Three, _) => {
            let r = classify3d_r3(config, RangeTriple::new(toa[0], toa[1], toa[2]))?;
            let verdict = match r.verdict {
                SolidVerdict::InteriorSolid => "InteriorSolid",
                SolidVerdict::OnSurface => "OnSurface",
                SolidVerdict::Outside => "Outside",
            };
            json!({
                "command": "classify",
                "class": config.class().name(),
                "verdict": verdict,
                "fiber": r.fiber(),
                "quartic_residual": num(r.quartic_raw),
                "quartic_normalized": num(r.quartic),
                "triangular_min": num(r.triangular_min),
            })
        }
    };
    Ok(Document { json, table: None })
}

fn p2_json(r: &P2Report) -> Value {
    let (verdict, on): (&str, Vec<String>) = match &r.verdict {
        P2Verdict::Interior => ("Interior", vec![]),
        P2Verdict::OnFacet(f) => ("OnFacet", f.iter().map(|x| x.to_string()).collect()),
        P2Verdict::Outside => ("Outside", vec![]),
    };
    json!({
        "verdict": verdict,
        "on_facets": on,
        "facets": r.facets.iter().map(|(f, res)| json!({ "facet": f.to_string(), "residual": num(*res) })).collect::<Vec<_>>(),
    })
}

fn classify_tdoa(config: &SensorConfig, tdoa: &[f64]) -> Res<Document> {
    expect_len(tdoa, 2, "--tdoa")?;
    let tau = PseudorangePair::new(tdoa[0], tdoa[1]);
    let r = classify_tau(config, tau)?;
    let fiber: Value = match r.fiber {
        Fiber::Finite(n) => n.into(),
        Fiber::Infinite => "infinite".into(),
    };
    let boundary = match r.label {
        TauLabel::BoundaryArc(BoundaryId::Facet(f)) => {
            json!({ "facet": f.to_string(), "preimage": f.preimage().to_string() })
        }
        TauLabel::BoundaryArc(BoundaryId::Ellipse) => json!({ "facet": "E" }),
        _ => Value::Null,
    };
    let mut v = json!({
        "command": "classify",
        "class": config.class().name(),
        "label": r.label.to_string(),
        "fiber": fiber,
        "boundary": boundary,
        "p2": p2_json(&r.p2),
    });
    match r.coeffs {
        Some(k) => {
            v["a"] = num(k.a);
            v["b"] = num(k.b);
            v["c"] = num(k.c);
            v["discriminant"] = num(k.discriminant());
            v["ellipse_residual"] = num(ellipse_residual(config, tau)?);
            v["a_normalized"] = num(r.shape_residual);
        }
        None => v["open_edge_residual"] = num(r.shape_residual),
    }
    Ok(Document { json: v, table: None })
}

fn surface_sample(config: &SensorConfig, (lo, hi): (f64, f64), n: usize) -> Res<Document> {
    config.planar_triple()?;
    let step = (hi - lo) / (n - 1) as f64;
    let coord = |k: usize| if k + 1 == n { hi } else { lo + step * k as f64 };
    let collinear = config.is_collinear();
    let rows: Vec<Res<([f64; 6], f64)>> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let x = Vec2::new(coord(k % n), coord(k / n));
            let t = forward3(config, x)?;
            let kk = gaussian_curvature(config, x).unwrap_or(f64::NAN);
            let res = if collinear { compatibility_residual(config, t)? } else { quartic_normalized(config, t)? };
            Ok(([x.x, x.y, t.t1, t.t2, t.t3, kk], res))
        })
        .collect();
    let mut table = Table::new(&["x", "y", "T1", "T2", "T3", "K"]);
    let mut max_res: f64 = 0.0;
    for r in rows {
        let (row, res) = r?;
        max_res = max_res.max(res.abs());
        table.rows.push(row.map(Cell::Num).to_vec());
    }
    let json = json!({
        "command": "surface-sample",
        "class": config.class().name(),
        "columns": table.header,
        "resolution": n,
        "range": [num(lo), num(hi)],
        "max_surface_residual": num(max_res),
        "rows": table.rows.iter().map(|r| r.iter().map(|c| match c { Cell::Num(v) => num(*v), _ => Value::Null }).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    Ok(Document { json, table: Some(table) })
}

fn all_hull_components() -> Vec<HullComponent> {
    let mut v: Vec<HullComponent> = (0..4).map(HullComponent::V).collect();
    v.extend((0..3).map(HullComponent::F));
    v.extend((0..3).map(HullComponent::G));
    for i in 0..3 {
        v.push(HullComponent::L(i, Side::Plus));
        v.push(HullComponent::L(i, Side::Minus));
    }
    v.extend((0..3).map(HullComponent::UnboundedEdge));
    v
}

fn q3_facets_json(config: &SensorConfig) -> Res<Value> {
    Ok(q3_loci(config)?
        .into_iter()
        .map(|l| {
            let p = q3_plane(config, l);
            json!({ "locus": l.to_string(), "normal": p.normal.map(num), "offset": num(p.offset) })
        })
        .collect())
}

fn features(config: &SensorConfig) -> Res<Document> {
    config.planar_triple()?;
    let json = if let (Some(rho), Ok((m, order))) = (config.rho(), config.canonical_receivers()) {
        json!({
            "command": "features",
            "class": config.class().name(),
            "rho": num(rho),
            "canonical_order": order.map(|i| i + 1),
            "q3_facets": q3_facets_json(config)?,
            "squared_quadric_coefficients": squared_quadric_coeffs(m[0].dist(m[1]), rho).map(num),
        })
    } else {
        let form = homogeneous_form(config)?;
        let (nodes, tropes) = nodes_and_tropes(config)?;
        let nodes: Vec<Value> = nodes
            .iter()
            .map(|n| {
                let (kind, receiver, principal) = match n.kind {
                    NodeKind::ReceiverImage(i) => ("receiver_image", Value::from(i + 1), false),
                    NodeKind::Affine => ("affine", Value::Null, false),
                    NodeKind::Ideal { principal } => ("ideal", Value::Null, principal),
                };
                let affine = form.to_affine(n.coords).map_or(Value::Null, |t| json!(t.to_array().map(num)));
                json!({ "coords": n.coords.map(num), "kind": kind, "receiver": receiver, "principal": principal, "range_triple": affine })
            })
            .collect();
        let tropes: Vec<Value> = tropes
            .iter()
            .map(|t| {
                json!({
                    "coords": t.coords.map(num),
                    "plane": plane_json(&t.plane),
                    "locus": t.locus.map_or(Value::Null, |l| l.to_string().into()),
                })
            })
            .collect();
        let arcs = Locus::ALL
            .iter()
            .map(|l| {
                let a = conic_arc(config, *l)?;
                Ok(json!({
                    "locus": l.to_string(),
                    "plane": plane_json(&a.plane),
                    "quadric": { "a": a.quadric.a.map(|r| r.map(num)), "b": a.quadric.b.map(num), "c": num(a.quadric.c) },
                    "bounds": a.bounds.iter().map(|b| json!({ "coef": b.coef.map(num), "constant": num(b.constant) })).collect::<Vec<_>>(),
                }))
            })
            .collect::<Res<Vec<Value>>>()?;
        let k = form.coeffs;
        json!({
            "command": "features",
            "class": config.class().name(),
            "coefficients": { "a": num(k.a), "b": num(k.b), "c": num(k.c) },
            "nodes": nodes,
            "tropes": tropes,
            "conic_arcs": arcs,
            "q3_facets": q3_facets_json(config)?,
            "hull_components": all_hull_components().iter().map(|h| json!({ "name": h.to_string(), "in_hull": h.in_hull() })).collect::<Vec<_>>(),
        })
    };
    Ok(Document { json, table: None })
}

fn params_json(a: f64, b: f64, c: f64, scale: f64, receivers: Vec<Value>) -> Value {
    json!({
        "command": "params",
        "a": num(a),
        "b": num(b),
        "c": num(c),
        "scale": num(scale),
        "cayley_residual": num(cayley_residual(a, b, c)),
        "receivers": receivers,
    })
}

fn params_to_triangle(v: &[f64]) -> Res<Document> {
    if !(2..=3).contains(&v.len()) {
        return Err(CliError::usage(format!("--abc needs a,c or a,c,scale, got {} values", v.len())));
    }
    let p = ParamPoint::new(v[0], v[1], v.get(2).copied().unwrap_or(1.0));
    let cfg = config_from_param(p)?;
    let receivers = cfg.receivers().iter().map(|m| v2(m.xy())).collect();
    Ok(Document { json: params_json(p.a, p.b(), p.c, p.scale, receivers), table: None })
}

fn params_from_config(config: &SensorConfig) -> Res<Document> {
    let (a, b, c) = abc_from_config(config)?;
    let receivers = config.receivers().iter().map(|m| v2(m.xy())).collect();
    Ok(Document { json: params_json(a, b, c, config.d(0, 1), receivers), table: None })
}

fn simulate(config: &SensorConfig, a: &SimulateArgs) -> Res<Document> {
    let dim = config.dimension().as_usize();
    expect_len(&a.source.0, dim, "--source")?;
    let x = Vec3::new(a.source.0[0], a.source.0[1], if dim == 3 { a.source.0[2] } else { 0.0 });
    let spec = NoiseSpec::new(a.sigma, a.bias, a.seed)?;
    let batch = gen_noisy_toa(config, x, spec, a.samples)?;
    let mut header = vec!["sample".to_string()];
    header.extend((1..=config.len()).map(|i| format!("T{i}")));
    let mut table = Table { header, rows: Vec::with_capacity(batch.samples.len()) };
    for (k, s) in batch.samples.iter().enumerate() {
        let mut row = vec![Cell::Int(k as i64)];
        row.extend(s.iter().map(|v| Cell::Num(*v)));
        table.rows.push(row);
    }
    let json = json!({
        "command": "simulate",
        "class": config.class().name(),
        "source": a.source.0.iter().map(|v| num(*v)).collect::<Vec<_>>(),
        "truth": batch.truth.iter().map(|v| num(*v)).collect::<Vec<_>>(),
        "samples": batch.samples,
        "metadata": batch.metadata,
    });
    Ok(Document { json, table: Some(table) })
}
