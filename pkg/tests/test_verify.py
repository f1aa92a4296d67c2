"""The independent verifier and the seeded instance generator."""
import inspect
import json
import math
import random

import pytest

import lpfactor
import lpfactor.verify
from lpfactor import (
    Exponent,
    FactorizationCertificate,
    InstanceSpec,
    LpInstance,
    MeasureSpace,
    SeqInstance,
    SimpleFunction,
    factor_countable,
    factor_general,
    factor_seq,
    gen_instance,
    verify_certificate,
)


def single_atom_instance():
    space = MeasureSpace.from_measures([1.0])
    return LpInstance(
        f=SimpleFunction(space, (2.0,)),
        g=SimpleFunction(space, (3.0,)),
        h=SimpleFunction(space, (6.2,)),
        p=Exponent(2),
        eps=1.0,
    )


class TestVerifier:
    def test_identity_certificate_passes_with_zero_distances(self):
        space = MeasureSpace.from_measures([1, 2, 3])
        f = SimpleFunction(space, (1, -1, 2))
        g = SimpleFunction(space, (0, 2, 2))
        h = SimpleFunction(space, tuple(a * b for a, b in zip(f.coefficients, g.coefficients)))
        instance = LpInstance(f=f, g=g, h=h, p=Exponent(2), eps=1.0)
        cert = FactorizationCertificate(
            u=f.coefficients, v=g.coefficients, radius_u=1.0, radius_v=1.0
        )
        report = verify_certificate(instance, cert)
        assert report.passed
        assert report.norm_u_dist == 0.0
        assert report.norm_v_dist == 0.0
        assert report.product_max_rel_error == 0.0
        assert report.constant_used == 0.25

    def test_single_atom_distances_recomputed(self):
        cert = FactorizationCertificate(
            u=(2.0,), v=(3.1,), radius_u=1.0, radius_v=1.0
        )
        report = verify_certificate(single_atom_instance(), cert)
        assert report.passed
        assert report.norm_u_dist == 0.0
        assert report.norm_v_dist == pytest.approx(0.1)

    def test_tampered_product_flagged(self):
        cert = FactorizationCertificate(
            u=(2.0 * 1.001,), v=(3.1,), radius_u=1.0, radius_v=1.0
        )
        report = verify_certificate(single_atom_instance(), cert)
        assert not report.passed
        assert not report.product_ok
        assert report.verdict == "fail"

    def test_shape_mismatch_rejected(self):
        cert = FactorizationCertificate(
            u=(2.0, 1.0), v=(3.1, 1.0), radius_u=1.0, radius_v=1.0
        )
        with pytest.raises(ValueError):
            verify_certificate(single_atom_instance(), cert)

    def test_strictness_honored_on_the_boundary(self):
        # v - g is exactly 0.1 here, landing on the radius
        space = MeasureSpace.from_measures([1.0])
        instance = LpInstance(
            f=SimpleFunction(space, (1.0,)),
            g=SimpleFunction(space, (0.0,)),
            h=SimpleFunction(space, (0.05,)),
            p=Exponent(2),
            eps=1.0,
        )
        at_radius = FactorizationCertificate(
            u=(0.5,), v=(0.1,), radius_u=1.0, radius_v=0.1, strict_v=False
        )
        assert verify_certificate(instance, at_radius).passed
        open_ball = FactorizationCertificate(
            u=(0.5,), v=(0.1,), radius_u=1.0, radius_v=0.1, strict_v=True
        )
        assert not verify_certificate(instance, open_ball).passed

    def test_never_imports_solver_code(self):
        source = inspect.getsource(lpfactor.verify)
        for solver_module in ("scalar", "countable", "lp", "sequences", "generate"):
            assert f".{solver_module} import" not in source
            assert f"from lpfactor.{solver_module}" not in source

    def test_seq_null_tail_handled(self):
        instance = SeqInstance(x=(1.0,), y=(1.0,), z=(1.02,), eps=1.0)
        cert = FactorizationCertificate(
            u=(1.0, 0.0), v=(1.02, 0.0), radius_u=1.0, radius_v=1.0
        )
        report = verify_certificate(instance, cert)
        assert report.passed
        assert report.constant_used == 0.0625


class TestJsonInterchange:
    def test_floats_round_trip_exactly(self):
        spec = InstanceSpec(
            kind="lp", n=20, eps=1.0, defect_fraction=0.7, seed=8, p=3,
            infinite_atoms=1,
        )
        inst = gen_instance(spec)
        rebuilt = lpfactor.instance_from_json(
            json.loads(json.dumps(inst.to_json()))
        )
        assert rebuilt.f.coefficients == inst.f.coefficients
        assert rebuilt.h.coefficients == inst.h.coefficients
        assert rebuilt.space.measures == inst.space.measures
        assert math.isinf(rebuilt.space.measures[-1])
        assert rebuilt.p == inst.p

    def test_standalone_simple_function_shape(self):
        space = MeasureSpace(("left", "right"), (2.0, math.inf))
        f = SimpleFunction(space, (0.1 + 0.2, 0.0))
        payload = lpfactor.simple_function_to_json(f)
        assert payload["space"]["atoms"][1]["measure"] == "inf"
        back = lpfactor.simple_function_from_json(json.loads(json.dumps(payload)))
        assert back == f

    def test_certificate_round_trip(self):
        cert = FactorizationCertificate(
            u=(1 / 3, 2.0), v=(3.0, -1e-17), radius_u=0.5, radius_v=0.5,
            strict_v=False,
        )
        back = FactorizationCertificate.from_json(
            json.loads(json.dumps(cert.to_json()))
        )
        assert back == cert


class TestGenerator:
    def test_zero_defect_fraction_rejected(self):
        with pytest.raises(ValueError):
            InstanceSpec(kind="lp", n=5, eps=1.0, defect_fraction=0.0, seed=1, p=2)

    def test_fraction_one_rejected(self):
        with pytest.raises(ValueError):
            InstanceSpec(kind="seq", n=5, eps=1.0, defect_fraction=1.0, seed=1)

    def test_deterministic_byte_identical(self):
        spec = InstanceSpec(kind="lp", n=30, eps=1.0, defect_fraction=0.5, seed=42, p=1.5)
        a = json.dumps(gen_instance(spec).to_json())
        b = json.dumps(gen_instance(spec).to_json())
        assert a == b
        spec_seq = InstanceSpec(kind="seq", n=30, eps=2.0, defect_fraction=0.5, seed=42)
        assert (
            gen_instance(spec_seq).to_json() == gen_instance(spec_seq).to_json()
        )

    def test_defect_lands_on_target(self):
        for kind in ("lp", "seq"):
            spec = InstanceSpec(
                kind=kind,
                n=40,
                eps=1.0,
                defect_fraction=0.99,
                seed=7,
                p=2 if kind == "lp" else None,
            )
            inst = gen_instance(spec)
            measured = inst.defect()  # independent norm recomputation
            bound = inst.feasibility_bound()
            assert 0.989 * bound <= measured <= 0.991 * bound

    def test_scaled_norms_land_in_range(self):
        from lpfactor import norm

        spec = InstanceSpec(
            kind="lp",
            n=25,
            eps=1.0,
            defect_fraction=0.5,
            seed=3,
            p=2,
            scale_min=1e3,
            scale_max=1e6,
        )
        inst = gen_instance(spec)
        assert 1e3 * 0.99 <= norm(inst.f, inst.p) <= 1e6 * 1.01
        assert 1e3 * 0.99 <= norm(inst.g, Exponent(2)) <= 1e6 * 1.01


class TestHighPrecisionAudit:
    def test_report_distances_match_50_digit_recomputation(self):
        from mpmath import mp, mpf, fabs, fsum as mpsum

        mp.dps = 50
        spec = InstanceSpec(
            kind="lp", n=20, eps=1.0, defect_fraction=0.9, seed=404, p=1.5
        )
        inst = gen_instance(spec)
        cert = factor_general(inst.f, inst.g, inst.h, inst.p, inst.eps)
        report = verify_certificate(inst, cert)
        assert report.passed
        p = 1.5
        du = mpsum(
            (fabs(mpf(a) - mpf(b)) ** p) * mpf(m)
            for a, b, m in zip(cert.u, inst.f.coefficients, inst.space.measures)
        ) ** (1 / mpf(p))
        dv = mpsum(
            (fabs(mpf(a) - mpf(b)) ** 3) * mpf(m)
            for a, b, m in zip(cert.v, inst.g.coefficients, inst.space.measures)
        ) ** (mpf(1) / 3)
        assert abs(report.norm_u_dist - float(du)) <= 1e-13 * max(1.0, float(du))
        assert abs(report.norm_v_dist - float(dv)) <= 1e-13 * max(1.0, float(dv))
        assert float(du) < 1.0 and float(dv) < 1.0
        worst = max(
            float(fabs(mpf(a) * mpf(b) - mpf(t)))
            for a, b, t in zip(cert.u, cert.v, inst.h.coefficients)
        )
        assert worst <= 1e-9 * max(1.0, max(abs(t) for t in inst.h.coefficients))

    def test_seq_distances_match_50_digit_recomputation(self):
        from mpmath import mp, mpf, fabs, fsum as mpsum

        mp.dps = 50
        spec = InstanceSpec(kind="seq", n=50, eps=1.0, defect_fraction=0.9, seed=505)
        inst = gen_instance(spec)
        cert = factor_seq(inst.x, inst.y, inst.z, inst.eps, "tail")
        report = verify_certificate(inst, cert)
        assert report.passed
        du = mpsum(fabs(mpf(a) - mpf(b)) for a, b in zip(cert.u, inst.x))
        assert abs(report.norm_u_dist - float(du)) <= 1e-13
        assert float(du) < 1.0


class TestRoundTripAndMutation:
    def test_round_trip_then_mutation_flips(self):
        rng = random.Random(100)
        flipped = 0
        for i in range(60):
            if i % 2 == 0:
                spec = InstanceSpec(
                    kind="lp",
                    n=rng.randint(2, 30),
                    eps=1.0,
                    defect_fraction=rng.uniform(0.2, 0.9),
                    seed=1000 + i,
                    p=rng.choice([1, 1.5, 2, 3]),
                )
                inst = gen_instance(spec)
                cert = factor_general(inst.f, inst.g, inst.h, inst.p, inst.eps)
                measures = inst.space.measures
            else:
                spec = InstanceSpec(
                    kind="seq",
                    n=rng.randint(2, 40),
                    eps=1.0,
                    defect_fraction=rng.uniform(0.2, 0.9),
                    seed=2000 + i,
                )
                inst = gen_instance(spec)
                cert = factor_seq(inst.x, inst.y, inst.z, inst.eps)
                measures = (1.0,) * len(cert.u)
            assert verify_certificate(inst, cert).passed
            targets = [
                j
                for j, (a, b) in enumerate(zip(cert.u, cert.v))
                if a != 0 and b != 0 and measures[j] > 0
            ]
            if not targets:
                continue
            j = rng.choice(targets)
            u = list(cert.u)
            u[j] *= 1.0 + 1e-3
            bad = FactorizationCertificate(
                u=tuple(u),
                v=cert.v,
                radius_u=cert.radius_u,
                radius_v=cert.radius_v,
                strict_u=cert.strict_u,
                strict_v=cert.strict_v,
            )
            assert not verify_certificate(inst, bad).passed
            flipped += 1
        assert flipped > 40

    def test_countable_solver_certificates_verify(self):
        rng = random.Random(5)
        for i in range(40):
            spec = InstanceSpec(
                kind="lp",
                n=rng.randint(1, 25),
                eps=2.0,
                defect_fraction=rng.uniform(0.1, 0.95),
                seed=3000 + i,
                p=rng.choice([1, 1.5, 2, 3, "inf"]),
            )
            inst = gen_instance(spec)
            cert = factor_countable(inst.f, inst.g, inst.h, inst.p, inst.eps)
            assert verify_certificate(inst, cert).passed
