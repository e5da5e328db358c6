import io

from lgrape.verify import run_verification


def test_coarse_dt_warns_but_passes():
    out = io.StringIO()
    failures = run_verification(dt=0.5, out=out)
    text = out.getvalue()
    assert failures == []
    assert "degraded accuracy" in text
    assert "[FAIL]" not in text


def test_injected_sign_error_fails_trace_preservation():
    out = io.StringIO()
    failures = run_verification(dt=0.25, inject_dissipator_sign_error=True, out=out)
    assert any(name.startswith("trace_preservation") for name in failures)
