"""Tour of the feature taxonomy.

The taxonomy is the data model everything else keys against: three
categories of device characteristics, split into seven sub-categories,
holding thirty scoreable features. It ships as a JSON config, so this
script is mostly about inspecting what is there.
"""

from dscore import default_taxonomy, pairwise_count, validate

tax = default_taxonomy()

print(f"taxonomy version {tax.version}")
for cat in tax.categories:
    print(f"\n{cat.code}: {cat.name}")
    for sub in cat.sub_categories:
        print(f"  {sub.code}: {sub.name}")
        for feat in sub.features:
            print(f"    {feat.code}  {feat.name}  [{feat.unit}, {feat.source}, "
                  f"range 0..{feat.x_max:g}]")

# How much questionnaire work does this structure imply? Experts compare
# elements pairwise, so the load grows quadratically per group: n elements
# cost n*(n-1)/2 comparisons.
counts = tax.pair_counts()
print(f"\ncategory pairs:       {counts.categories}")
print(f"sub-category pairs:   {counts.subcategories} (one 7-way comparison)")
print(f"feature pairs:        {counts.features_total} "
      f"(per sub-category: {counts.features_per_subcategory})")
print(f"a full 7-element matrix alone would cost {pairwise_count(7)} comparisons")

# The preliminary filtering step in the questionnaire exists precisely to
# shrink these numbers: dropping one sub-category removes its feature
# pairs and its row in the 7-way comparison.

violations = validate(tax)
print(f"\nvalidate() -> {violations!r} (empty means every invariant holds)")
