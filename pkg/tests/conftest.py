import functools

ACCEPTANCE = {}


def criterion(number, title):
    """Record a PASS/FAIL line for an acceptance test, whatever the outcome."""

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except BaseException as e:
                msg = str(e).strip().splitlines()[0] if str(e).strip() else type(e).__name__
                ACCEPTANCE[number] = (False, title, msg)
                raise
            ACCEPTANCE[number] = (True, title, detail or "")

        return run

    return wrap


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[n]
        tr.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {title} -- {detail}")
