import pytest

from pvicurves.pipeline import DEFAULT_CHAINS, PipelineError, run_pipeline
from pvicurves.pvi import ThetaParams
from pvicurves.transforms import ShapeError


@pytest.mark.parametrize("chain", DEFAULT_CHAINS, ids=lambda c: "->".join(c))
def test_default_chains(catalog, chain):
    report = run_pipeline(chain, catalog)
    assert report.ok
    for step in report.steps:
        assert step.theta_ok and step.residual_zero
        assert step.degree_out == 2 * step.degree_in


def test_theta_chain_values(catalog):
    report = run_pipeline(("seed-10", "sol-45", "sol-51"), catalog)
    assert [s.theta for s in report.steps] == [str(ThetaParams.of(0, 1, 0, 9, denominator=10)),
                                               str(ThetaParams.of(1, 1, 1, 19, denominator=20))]


def test_first_level_steps_match_without_relabelling(catalog):
    for chain in DEFAULT_CHAINS:
        first = run_pipeline(chain[:2], catalog, relabel=False).steps[0]
        assert first.match is not None and first.match.relabelling is None


def test_second_level_needs_relabelling(catalog):
    strict = run_pipeline(("seed-18", "sol-49", "sol-52"), catalog, relabel=False)
    assert not strict.ok
    assert strict.steps[-1].match is None and strict.steps[-1].residual_zero
    loose = run_pipeline(("seed-18", "sol-49", "sol-52"), catalog)
    assert loose.steps[-1].match.relabelling == "(t/y,t)"
    assert loose.steps[-1].via_model == "genus3"


def test_pipeline_errors(catalog):
    with pytest.raises(ShapeError):
        run_pipeline(("sol-45", "sol-51"), catalog)
    with pytest.raises(PipelineError):
        run_pipeline(("seed-10", "sol-99"), catalog)
    with pytest.raises(PipelineError):
        run_pipeline(("seed-10",), catalog)


def test_mismatched_target_fails(catalog):
    report = run_pipeline(("seed-10", "sol-44"), catalog)
    assert not report.ok
    assert not report.steps[0].theta_ok
