import pytest

from pimmur.core.errors import SteeringLeak
from pimmur.experiments.steering import (
    CONFIRMATION_BIAS,
    CONFIRMATION_BIAS_REVERSED,
    RELAY_ACCURATE,
    RELAY_INACCURATE,
    SteeringGuard,
    guard_for,
    scan,
    steering_line,
)


@pytest.mark.parametrize(
    "text,expected",
    [
        (CONFIRMATION_BIAS, ["confirmation bias"]),
        (f"Lately {CONFIRMATION_BIAS_REVERSED}.", ["inverted belief bias"]),
        (RELAY_ACCURATE, ["relay accuracy"]),
        (RELAY_INACCURATE, ["relay accuracy"]),
        ("So far 3 agents chose A.", ["aggregate counts"]),
        ("You have 4 friends already.", ["degree disclosure"]),
        ("Friends: 12", ["degree disclosure"]),
        ("You consider Ben a good friend.", []),
        ("Is Ben a Friend or an Enemy to you?", []),
        ("Please select exactly 2 people from the list to make friend with.", []),
    ],
)
def test_deny_list(text, expected) -> None:
    assert scan(text) == expected


def test_steering_lines_per_variant() -> None:
    assert steering_line("fake_news", "none") is None
    assert steering_line("fake_news", "original_steering") == CONFIRMATION_BIAS
    assert steering_line("telephone", "reversed_steering") == RELAY_INACCURATE
    assert steering_line("herd", "original_steering") is None


def test_guard_enforces_only_plain_runs() -> None:
    strict = guard_for("none")
    strict.check(["a calm topic", "", "it is your turn"], where="group_turn:agent-000")
    with pytest.raises(SteeringLeak) as info:
        strict.check([RELAY_ACCURATE], where="private_turn:agent-001")
    assert "agent-001" in str(info.value)
    assert strict.report() == {"scanned": 2, "hits": {"relay accuracy": 1}}

    counting = SteeringGuard(enforce=False, keep=True)
    counting.check([CONFIRMATION_BIAS], where="x")
    counting.check([CONFIRMATION_BIAS], where="y")
    assert counting.hits == {"confirmation bias": 2}
    assert counting.texts == [CONFIRMATION_BIAS, CONFIRMATION_BIAS]
