import pytest

from rtal.business_rules.exceptions.training_exceptions import EGradientCheckFailed
from rtal.business_rules.use_cases.gradcheck_use_case import SUITE, GradcheckResult, GradcheckUseCase


@pytest.mark.parametrize("name", ['softmax', 'layer_norm', 'relu', 'matmul', 'ffn', 'agg_mean',
                                  'agg_concat_ffn', 'agg_ewp_ffn'])
def test_should_pass_the_primitive_checks(injector, name):
    gradcheck_use_case = injector.get(GradcheckUseCase)
    results = gradcheck_use_case.run([name])

    assert results[0].passed, results[0]
    gradcheck_use_case.verify(results)


@pytest.mark.slow
def test_should_pass_the_whole_suite(injector):
    gradcheck_use_case = injector.get(GradcheckUseCase)
    results = gradcheck_use_case.run()

    assert [result.name for result in results] == list(SUITE)
    gradcheck_use_case.verify(results)


def test_should_fail_verification_when_a_check_is_above_threshold(injector):
    results = [GradcheckResult(name='softmax', error=1e-9, threshold=1e-5, passed=True),
               GradcheckResult(name='ffn', error=1e-2, threshold=1e-5, passed=False)]
    with pytest.raises(EGradientCheckFailed) as execinfo:
        injector.get(GradcheckUseCase).verify(results)

    assert "['ffn']" in str(execinfo.value)


def test_should_flag_checks_above_a_tight_threshold(injector):
    results = injector.get(GradcheckUseCase).run(['softmax'], threshold=0.0)

    assert results[0].passed is (results[0].error == 0.0)


def test_should_fail_on_an_unknown_check(injector):
    with pytest.raises(KeyError) as execinfo:
        injector.get(GradcheckUseCase).run(['softplus'])

    assert "softplus" in str(execinfo.value)
