//! Two spin-½ particles in the singlet.

use alloc::format;
use alloc::vec;

use super::report::{ExperimentReport, Outcome};
use super::Setup;
use crate::hilbert::{
    commutator, embed, expect, project, singlet, singlet_z_form, spin_basis, spin_component, tensor, total_spin, Ket,
    SpinAxis, SpinSign,
};
use crate::{Result, C64};

fn sign_tag(sign: SpinSign) -> &'static str {
    match sign {
        SpinSign::Plus => "p",
        SpinSign::Minus => "m",
    }
}

pub fn run_spin_epr(setup: &Setup) -> Result<Outcome> {
    let hbar = setup.hbar;
    let mut report = ExperimentReport::new("spin_epr");
    report.input("hbar", hbar);

    let psi = singlet();
    let s1y = embed(&spin_component(SpinAxis::Y, hbar), 0);
    let s2y = embed(&spin_component(SpinAxis::Y, hbar), 1);

    let total_norm = total_spin(SpinAxis::Y, hbar).apply(&psi)?.norm();
    report.result("eq_3_4_total_sy_norm", total_norm);
    let mut worst: f64 = 0.0;
    for axis in SpinAxis::ALL {
        worst = worst.max(total_spin(axis, hbar).apply(&psi)?.norm());
    }
    report.result("eq_3_4_total_spin_max_norm", worst);

    let correlator = expect(&(&s1y * &s2y), &psi)?;
    let mean_product = expect(&s1y, &psi)? * expect(&s2y, &psi)?;
    report.result("eq_3_5_correlator", correlator);
    report.result("eq_3_5_mean_product", mean_product);
    report.result("eq_3_5_s1y_squared", expect(&(&s1y * &s1y), &psi)?);

    report.result("eq_3_6_max_abs_diff", psi.max_abs_diff(&singlet_z_form())?);

    // ⟨v₋v₊|u₋u₊⟩: both are product states, yet they differ.
    let vmvp = tensor(&spin_basis(SpinAxis::Y, SpinSign::Minus), &spin_basis(SpinAxis::Y, SpinSign::Plus));
    let umup = tensor(&spin_basis(SpinAxis::Z, SpinSign::Minus), &spin_basis(SpinAxis::Z, SpinSign::Plus));
    let overlap = vmvp.inner(&umup)?.norm();
    report.result("eq_3_9_overlap", overlap);
    report.flag("eq_3_9_states_differ", overlap < 1.0 - 1e-12);

    // After s₁z = +ħ/2 the pair is u₊(1)u₋(2); expand it on the v basis.
    let (after, probability) = project(&psi, 0, SpinAxis::Z, SpinSign::Plus)?;
    let upum = tensor(&spin_basis(SpinAxis::Z, SpinSign::Plus), &spin_basis(SpinAxis::Z, SpinSign::Minus));
    let phase = upum.inner(&after)?;
    report.result("eq_3_10_projection_probability", probability);
    report.result("eq_3_10_state_phase_error", (phase.norm() - 1.0).abs());
    let mut rebuilt = Ket::new(vec![C64::new(0.0, 0.0); 4]);
    for a in [SpinSign::Plus, SpinSign::Minus] {
        for b in [SpinSign::Plus, SpinSign::Minus] {
            let basis = tensor(&spin_basis(SpinAxis::Y, a), &spin_basis(SpinAxis::Y, b));
            let coeff = basis.inner(&upum)?;
            let key = format!("eq_3_10_coeff_v{}v{}", sign_tag(a), sign_tag(b));
            report.result(&format!("{key}_re"), coeff.re);
            report.result(&format!("{key}_im"), coeff.im);
            rebuilt = &rebuilt + &basis.scale(coeff);
        }
    }
    report.result("eq_3_10_expansion_residual", rebuilt.max_abs_diff(&upum)?);
    report.result("eq_3_10_correlator_after", expect(&(&s1y * &s2y), &after)?);
    report.result("eq_3_10_s2z_after", expect(&embed(&spin_component(SpinAxis::Z, hbar), 1), &after)?);

    // [s_y, s_z] = iħ s_x: no joint eigenbasis for the components of one spin.
    let sy = spin_component(SpinAxis::Y, hbar);
    let sz = spin_component(SpinAxis::Z, hbar);
    let sx = spin_component(SpinAxis::X, hbar);
    let residual = commutator(&sy, &sz).max_abs_diff(&sx.scale(C64::new(0.0, hbar)));
    report.result("commutator_residual", residual);

    report.flag("clear_evasion", false);
    report.note(
        "the singlet has the same form in the y and z bases, so sharp s1y and s2y cannot be combined with \
         the s1z outcome to give sharp values of non-commuting components",
    );
    report.conclusion = Some("no clear evasion".into());
    Ok(report.into())
}
