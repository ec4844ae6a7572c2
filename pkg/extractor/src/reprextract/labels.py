"""Binary task over the ten CIFAR-10 categories.

Class 0 groups the vehicle-or-large-animal categories, class 1 the small
animals; the six/four split partitions all ten class names.
"""

CLASS_0 = ("airplane", "bird", "automobile", "ship", "horse", "truck")
CLASS_1 = ("cat", "deer", "dog", "frog")

_MAPPING = {name: 0 for name in CLASS_0}
_MAPPING.update({name: 1 for name in CLASS_1})


def label_map(class_name: str) -> int:
    """Binary label of one CIFAR-10 class name."""
    try:
        return _MAPPING[class_name]
    except KeyError:
        raise ValueError(
            f"unknown CIFAR-10 class {class_name!r}; expected one of {sorted(_MAPPING)}"
        ) from None
