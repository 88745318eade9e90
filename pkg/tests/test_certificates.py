"""Tests for certificate construction, verification, and the CLI."""

import json
import os
import subprocess
import sys

import pytest

from coverforge.certificates import (
    ConstructConfig,
    attach_digest,
    bundle_report,
    canonical_json,
    construct,
    parse_certificate,
    verify,
    write_certificate,
)
from coverforge.errors import BadParameters, BudgetExceeded, SchemaMismatch


def run_cli(*args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "coverforge", *args],
        capture_output=True,
        text=True,
        env=env,
    )


@pytest.fixture(scope="module")
def char_cyclic_cert():
    return construct(ConstructConfig(case="char-cyclic", genus=0, punctures=3))


@pytest.fixture(scope="module")
def genus_zero_cert():
    return construct(ConstructConfig(case="genus-zero", p=5, punctures=3))


class TestConstruction:
    def test_char_cyclic_all_pass(self, char_cyclic_cert):
        cert = char_cyclic_cert
        assert cert["all_checks_pass"]
        assert cert["variant"] == "characteristic-core (orbit variant)"
        assert cert["cover"]["peripheral_orders"] == [3, 3, 3]
        assert cert["cover"]["degree"] == 9
        assert cert["orbit"]["k"] == 4

    def test_char_sym3(self):
        cert = construct(ConstructConfig(case="char-sym3", genus=1))
        assert cert["all_checks_pass"]
        assert cert["cover"]["peripheral_orders"] == [3]
        assert cert["cover"]["degree"] == 108

    def test_genus_zero_p5_records_honest_failures(self, genus_zero_cert):
        # at p = 5 the diagonal normalizer is a Klein four-group whose
        # normalizer has order 12, so these two checks genuinely fail
        cert = genus_zero_cert
        checks = cert["checks"]
        assert checks["self_normalizing"] is False
        assert checks["deck_trivial"] is False
        assert not cert["all_checks_pass"]
        passing = {
            k for k, v in checks.items() if v
        }
        assert {
            "relation_holds",
            "surjective",
            "peripheral_orders_expected",
            "aut_eq_inn",
            "orbit_completed",
            "characteristic_closure",
            "hall_surjective",
            "local_degrees_divisible_by_delta",
            "genus_ge_bound",
            "chi_even",
        } <= passing

    def test_genus_zero_p5_geometry(self, genus_zero_cert):
        cert = genus_zero_cert
        assert cert["orbit"]["size"] == 600
        assert cert["orbit"]["k"] == 10
        assert cert["cover"]["degree"] == 15**10
        assert cert["cover"]["euler"] == -516678750000
        assert cert["cover"]["genus"] == 258339375001

    def test_single_factor_diagnostic(self):
        cert = construct(
            ConstructConfig(case="generic", p=5, genus=1, punctures=2, single_factor=True)
        )
        assert cert["variant"] == "single-factor-diagnostic"
        assert cert["cover"]["degree"] == 15
        assert cert["cover"]["euler"] == -24
        assert cert["cover"]["genus"] == 13
        assert cert["cover"]["bound"] == [5, 1]
        ram = cert["cover"]["ramification"]
        assert all(entry["local_degrees"] == [[5, 3]] for entry in ram)

    def test_determinism(self, char_cyclic_cert):
        again = construct(ConstructConfig(case="char-cyclic", genus=0, punctures=3))
        assert canonical_json(char_cyclic_cert) == canonical_json(again)

    def test_dihedral_variant_certificate(self):
        cert = construct(ConstructConfig(case="genus-zero", p=13, punctures=3, explicit_t=4))
        assert cert["cover"]["bound_kind"] == "proposition"
        assert cert["inputs"]["flags"]["explicit_t"] == 4
        assert cert["checks"]["peripheral_orders_expected"]
        assert cert["all_checks_pass"]

    def test_dihedral_variant_reducible_branch_is_honest(self):
        # t=2 at p=13 splits the trace polynomial: the last peripheral
        # order 6 shares a factor with the dihedral order 14, so the
        # coprimality condition genuinely fails and is recorded as such
        cert = construct(ConstructConfig(case="genus-zero", p=13, punctures=3, explicit_t=2))
        assert cert["checks"]["peripheral_orders_expected"]
        assert not cert["checks"]["coprimality"]
        assert not cert["all_checks_pass"]

    def test_unknown_case_rejected(self):
        with pytest.raises(BadParameters):
            ConstructConfig(case="nonsense")

    def test_missing_parameters_rejected(self):
        with pytest.raises(BadParameters):
            construct(ConstructConfig(case="generic", p=5))


class TestVerification:
    def test_round_trip(self, char_cyclic_cert):
        text = canonical_json(char_cyclic_cert)
        assert parse_certificate(text) == char_cyclic_cert

    def test_genuine_certificate_passes(self, char_cyclic_cert):
        report = verify(char_cyclic_cert)
        assert report.passed
        assert report.digest_ok and not report.mismatches

    def test_honest_failures_fail_verification(self, genus_zero_cert):
        # recomputation agrees bit for bit, but the check vector carries
        # genuine falses, so overall verification does not pass
        report = verify(genus_zero_cert)
        assert report.digest_ok
        assert not report.mismatches
        assert not report.all_checks_true
        assert not report.passed

    def test_tampered_field_detected_by_digest(self, char_cyclic_cert):
        mutated = json.loads(canonical_json(char_cyclic_cert))
        mutated["cover"]["degree"] += 1
        report = verify(mutated)
        assert not report.passed and not report.digest_ok
        assert report.mismatches == ("certificate_digest",)

    def test_tampered_and_redigested_detected_by_recomputation(self, char_cyclic_cert):
        mutated = json.loads(canonical_json(char_cyclic_cert))
        mutated["cover"]["degree"] += 1
        mutated = attach_digest(mutated)
        report = verify(mutated)
        assert not report.passed and report.digest_ok
        assert any("cover.degree" in path for path in report.mismatches)

    def test_foreign_t_detected(self):
        cert = construct(ConstructConfig(case="genus-zero", p=13, punctures=3))
        mutated = json.loads(canonical_json(cert))
        mutated["constants"]["t"] = 3
        mutated = attach_digest(mutated)
        report = verify(mutated)
        assert not report.passed
        assert any(path.startswith("constants.t") for path in report.mismatches)

    def test_schema_mismatch(self):
        with pytest.raises(SchemaMismatch):
            parse_certificate("{}")
        with pytest.raises(SchemaMismatch):
            parse_certificate("not json")

    def test_write_is_atomic(self, tmp_path, char_cyclic_cert):
        path = tmp_path / "cert.json"
        write_certificate(char_cyclic_cert, str(path))
        assert parse_certificate(path.read_text()) == char_cyclic_cert
        leftovers = [p for p in os.listdir(tmp_path) if p.startswith(".coverforge-")]
        assert not leftovers


class TestBundleReport:
    @pytest.mark.parametrize("g,h,expected", [(2, 2, 4), (13, 2, 48), (4, 2, 12)])
    def test_euler_values(self, g, h, expected):
        assert bundle_report(g, h)["euler_total"] == expected

    def test_distinct_fibers_give_distinct_euler(self):
        values = {bundle_report(g, 2)["euler_total"] for g in (2, 4, 13, 20)}
        assert len(values) == 4

    def test_premise_flags(self):
        report = bundle_report(3, 2, ["null-homologous"])
        assert report["signature_zero"] and not report["atoroidal"]
        both = bundle_report(3, 2, ["null-homologous", "purely-pA"])
        assert both["signature_zero"] and both["atoroidal"]

    def test_low_genus_rejected(self):
        with pytest.raises(BadParameters):
            bundle_report(1, 2)
        with pytest.raises(BadParameters):
            bundle_report(2, 1)

    def test_unknown_premise_rejected(self):
        with pytest.raises(BadParameters):
            bundle_report(2, 2, ["made-up"])


class TestCli:
    def test_construct_verify_cycle(self, tmp_path):
        out = tmp_path / "cert.json"
        proc = run_cli(
            "construct", "--case", "char-cyclic", "--genus", "0", "--punctures", "3",
            "--out", str(out),
        )
        assert proc.returncode == 0, proc.stderr
        assert out.exists()
        proc = run_cli("verify", str(out))
        assert proc.returncode == 0, proc.stderr

    def test_verify_detects_mutation(self, tmp_path):
        out = tmp_path / "cert.json"
        run_cli("construct", "--case", "char-cyclic", "--genus", "0", "--punctures", "3",
                "--out", str(out))
        cert = json.loads(out.read_text())
        cert["orbit"]["size"] += 1
        out.write_text(json.dumps(cert))
        proc = run_cli("verify", str(out))
        assert proc.returncode == 4

    def test_parameter_error_exit_code(self, tmp_path):
        out = tmp_path / "nope.json"
        proc = run_cli("construct", "--case", "genus-zero", "--p", "7", "--punctures", "3",
                       "--out", str(out))
        assert proc.returncode == 2
        assert not out.exists()

    def test_budget_exit_code_and_no_file(self, tmp_path):
        out = tmp_path / "nope.json"
        proc = run_cli(
            "construct", "--case", "genus-zero", "--p", "5", "--punctures", "3",
            "--orbit-budget", "10", "--out", str(out),
        )
        assert proc.returncode == 3
        assert not out.exists()

    def test_env_budget_override(self, tmp_path):
        out = tmp_path / "nope.json"
        proc = run_cli(
            "construct", "--case", "genus-zero", "--p", "5", "--punctures", "3",
            "--out", str(out),
            env_extra={"COVERFORGE_ORBIT_BUDGET": "10"},
        )
        assert proc.returncode == 3
        assert not out.exists()

    def test_bundle_report_cli(self):
        proc = run_cli("bundle-report", "--fiber-genus", "13", "--base-genus", "2",
                       "--premise", "null-homologous")
        assert proc.returncode == 0
        report = json.loads(proc.stdout)
        assert report["euler_total"] == 48 and report["signature_zero"]

    def test_orbit_dump(self, tmp_path):
        dump = tmp_path / "orbit.txt"
        proc = run_cli("orbit", "--case", "char-cyclic", "--genus", "0", "--punctures", "3",
                       "--dump", str(dump))
        assert proc.returncode == 0
        lines = dump.read_text().splitlines()
        assert len(lines) == 8
        assert lines == sorted(lines, key=lambda s: json.loads(s))
        assert json.loads(lines[0]) == [0, 1]

    def test_search_exhausted_exit_code(self, monkeypatch, capsys):
        import coverforge.cli as cli
        from coverforge.errors import SearchExhausted

        def boom(config):
            raise SearchExhausted("no admissible pair")

        monkeypatch.setattr(cli, "construct", boom)
        code = cli.main(["construct", "--case", "once-punctured", "--p", "13",
                         "--genus", "1"])
        assert code == 5
