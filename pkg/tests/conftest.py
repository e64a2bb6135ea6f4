import pytest

from ifind.corpus import Item, Keyword, build_index
from ifind.interest import TrainingSample, UserProfile, fit


@pytest.fixture
def animal_corpus():
    """Two items with overlapping pet labels."""
    return build_index(
        [
            Item("A", "All About Cats", (Keyword("cat"), Keyword("hat"))),
            Item("B", "Dog Days", (Keyword("dog"),)),
        ]
    )


@pytest.fixture
def tom_corpus():
    """The two Tom stories distinguishable only by interest labels."""
    return build_index(
        [
            Item(
                "tom-pool",
                "Tom Is in The Swimming Pool",
                (Keyword("tom"), Keyword("swimming"), Keyword("pool")),
            ),
            Item(
                "tom-night",
                "Tom's Nightmare",
                (Keyword("tom"), Keyword("nightmare"), Keyword("night")),
            ),
        ]
    )


@pytest.fixture
def tom_model():
    """Interest model where (boy, summer) profiles prefer swimming."""
    samples = [
        TrainingSample(UserProfile.of("boy", "summer"), frozenset({"swimming", "game"})),
        TrainingSample(UserProfile.of("boy", "summer"), frozenset({"swimming", "game"})),
        TrainingSample(UserProfile.of("boy", "summer"), frozenset({"swimming"})),
        TrainingSample(UserProfile.of("girl", "night"), frozenset({"sleep", "reading"})),
        TrainingSample(UserProfile.of("girl", "night"), frozenset({"sleep", "reading"})),
        TrainingSample(UserProfile.of("girl", "night"), frozenset({"reading"})),
    ]
    factors = ["boy", "girl", "night", "summer"]
    interests = ["game", "reading", "sleep", "swimming"]
    return fit(samples, interests, factors)
