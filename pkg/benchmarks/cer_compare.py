"""
Compare corpus CER scoring with jiwer
"""

import asrscale as asr

import jiwer
import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def make_corpus(rng: np.random.Generator, utterances: int, length: int):
    alphabet = list("的一是在不了有和人这中大为上个国我以要他时来用们生到作地于出就分对成会可主发年动同工也能下过子说产种面而方后多定行学法所民得经")
    references, hypotheses = [], []
    for _ in range(utterances):
        ref = rng.choice(alphabet, size=length)
        hyp = ref.copy()
        edits = rng.integers(0, len(ref), size=max(1, length // 10))
        hyp[edits] = rng.choice(alphabet, size=len(edits))
        references.append("".join(ref))
        hypotheses.append("".join(hyp))
    return references, hypotheses


if __name__ == "__main__":
    import timeit
    num_repeats = 5
    rng = np.random.default_rng(0)
    results = {"asrscale": {},
               "jiwer": {}}
    for corpus_size in ["small", "medium", "large"]:
        print("-" * 20)
        print(f"corpus size: {corpus_size}")

        if corpus_size == "medium":
            references, hypotheses = make_corpus(rng, 1000, 20)
        elif corpus_size == "large":
            references, hypotheses = make_corpus(rng, 10000, 20)
        else:
            references, hypotheses = make_corpus(rng, 100, 20)
        pairs = [asr.UtterancePair(r, h) for r, h in zip(references, hypotheses)]

        ours = asr.corpus_cer(pairs)
        theirs = jiwer.cer(references, hypotheses)
        assert abs(ours - theirs) < 1e-12, (ours, theirs)

        asr_time_sec = timeit.timeit("asr.corpus_cer(pairs)",
                                     globals=globals(),
                                     number=num_repeats)
        results["asrscale"][corpus_size] = asr_time_sec
        print(f"asrscale CER time (s) for {num_repeats} repeats: {asr_time_sec}")
        jiwer_time_sec = timeit.timeit("jiwer.cer(references, hypotheses)",
                                       globals=globals(),
                                       number=num_repeats)
        results["jiwer"][corpus_size] = jiwer_time_sec
        print(f"jiwer CER time (s) for {num_repeats} repeats: {jiwer_time_sec}")
        ratio = asr_time_sec / jiwer_time_sec
        if ratio > 1:
            print(f"asrscale CER is slower than jiwer with ratio: {ratio:.2f} fold")
        else:
            print(f"asrscale CER is faster than jiwer with ratio: {ratio:.2f} fold")
        print("-" * 20)
    df = pd.DataFrame.from_dict(results)
    print("df:\n", df)
    fig, ax = plt.subplots()
    df.plot.bar(ax=ax,
                rot=0,
                logy=True,
                xlabel="Corpus Size",
                ylabel=f"log of time (s) for {num_repeats} repeats",
                title="Corpus CER: asrscale vs. jiwer")
    fig.savefig("cer_compare.png", dpi=300)
