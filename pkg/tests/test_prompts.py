from pimmur.core.profiles import build_profile
from pimmur.core.prompts import GenericQuery, GroupChat, Impression, IndividualChat, assemble_prompt
from pimmur.memory.store import MemoryStore

PROFILE = build_profile(7, 0)
TOPIC = "What has been happening in your town lately."


def _memory() -> str:
    return MemoryStore().render_context()


def test_group_chat_uses_the_chatroom_framing() -> None:
    request = assemble_prompt(PROFILE, _memory(), TOPIC, GroupChat())
    assert request.system_prompt.startswith("You are in a virtual chatroom.")
    assert PROFILE.display_name in request.system_prompt
    assert TOPIC in request.system_prompt
    assert "Never mix up yourself with others." in request.system_prompt
    assert "it is your turn to speak" in request.last_turn
    assert request.kind == "group_turn"
    assert request.temperature == 0.7


def test_empty_memory_still_renders_headers() -> None:
    request = assemble_prompt(PROFILE, _memory(), TOPIC, GroupChat())
    assert "Here are the history of past conversations:" in request.system_prompt
    assert "Here are your impression of each person you have chat with:" in request.system_prompt


def test_individual_chat_shows_history_and_target() -> None:
    action = IndividualChat(target="Ben", history=(("Ben", "Hello there"),))
    request = assemble_prompt(PROFILE, _memory(), TOPIC, action)
    assert "individual conversation with Ben" in request.system_prompt
    assert "Ben: Hello there" in request.system_prompt
    assert request.last_turn.startswith("Now please generate what you would say to Ben.")
    assert request.slots["target"] == "Ben"
    assert request.kind == "private_turn"


def test_impression_action() -> None:
    request = assemble_prompt(PROFILE, _memory(), TOPIC, Impression(target="Ben"))
    assert "impression of Ben" in request.last_turn
    assert request.kind == "impression"


def test_generic_query_exits_the_discussion() -> None:
    action = GenericQuery(query="Do you believe it?", choices=("Yes", "No"))
    request = assemble_prompt(PROFILE, _memory(), TOPIC, action, probe_temperature=0.0)
    assert "You have exited the group discussion" in request.last_turn
    assert "Do you believe it?" in request.last_turn
    assert "Answer with one of: Yes, No" in request.last_turn
    assert request.temperature == 0.0
    assert request.slots["choice_0"] == "Yes" and request.slots["choice_1"] == "No"


def test_selection_query_lists_options() -> None:
    action = GenericQuery(query="select exactly 2 people", options=("Ava", "Ben", "Cy"), pick=2)
    request = assemble_prompt(PROFILE, _memory(), TOPIC, action)
    assert "People you have met: Ava, Ben, Cy" in request.last_turn
    assert request.slots["first_picks"] == "Ava, Ben"


def test_notes_and_steering_placement() -> None:
    request = assemble_prompt(
        PROFILE, _memory(), TOPIC, GroupChat(), notes=["You consider Ben a good friend."], steering="Be brief."
    )
    assert "You consider Ben a good friend." in request.system_prompt
    assert request.last_turn.endswith("Be brief.")
    query = assemble_prompt(PROFILE, _memory(), TOPIC, GenericQuery(query="Q"), steering="Be brief.")
    assert "Be brief." not in query.prompt_text()
