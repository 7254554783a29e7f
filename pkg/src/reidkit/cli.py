"""Command-line interface.

Model artifacts live in a models directory:

    skinhair.ridm   skin/hair pixel classifier
    pca.ridp        appearance PCA + skeleton statistics
    global.ridl     per-label parse model
    bow.ridw        superpixel codebooks

Exit codes: 0 success, 1 usage, 2 data error, 3 protocol/network error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from reidkit.config import Config
from reidkit.data import fixture as fixture_mod
from reidkit.data.io import (
    discover_corpus,
    load_annotated_dir,
    load_ground_truth,
    load_sequence,
    write_png,
)
from reidkit.data.vocab import load_vocabulary
from reidkit.descriptor.pca import PcaModel, compress, train_pca
from reidkit.descriptor.pipeline import (
    annotated_appearance_vector,
    collect_training_stats,
    frame_appearance_vector,
    frame_identity_descriptor,
    sequence_identity_descriptor,
)
from reidkit.errors import ProtocolError, ReidError
from reidkit.features import stack
from reidkit.features.skinhair import SkinHairModel, train_skin_hair
from reidkit.parsing import metrics
from reidkit.parsing.bow import BowVocabulary, train_bow
from reidkit.parsing.fashion import (
    FashionGallery,
    build_fashion_entry,
    load_fashion_gallery,
    save_fashion_gallery,
)
from reidkit.parsing.global_model import GlobalParseModel, train_global
from reidkit.parsing.pipeline import ParseModels, parse_query
from reidkit.retrieval.gallery import (
    Gallery,
    GalleryEntry,
    identify as gallery_identify,
    load_gallery,
    rank_subjects,
    retrieve_tags,
    save_gallery,
)
from reidkit.skeleton import gate_frame, project
from reidkit.service import client as rc


def _config_from_args(args) -> Config:
    config = Config()
    if getattr(args, "config", None):
        config = Config.from_file(args.config)
    return config


def _models_dir(args) -> Path:
    return Path(args.models)


def _load_skinhair(args) -> SkinHairModel:
    return SkinHairModel.load(_models_dir(args) / "skinhair.ridm")


def _load_pca(args) -> PcaModel:
    return PcaModel.load(_models_dir(args) / "pca.ridp")


def _load_parse_models(args) -> ParseModels:
    d = _models_dir(args)
    return ParseModels(
        skin_hair=SkinHairModel.load(d / "skinhair.ridm"),
        global_model=GlobalParseModel.load(d / "global.ridl"),
        bow=BowVocabulary.load(d / "bow.ridw"),
        fashion=load_fashion_gallery(args.fashion_dir),
    )


def _base_features_for(annotated, config: Config) -> np.ndarray:
    h, w = annotated.labels.shape
    uv, tracked = stack.joints_from_pose2d(annotated.pose2d, w, h)
    return stack.base_features(annotated.rgb, uv, tracked,
                               lbp_window=config.lbp_window, cell_size=config.hog_cell)


def _split_host_port(spec: str) -> tuple[str, int]:
    host, _, port = spec.rpartition(":")
    if not host or not port.isdigit():
        raise ProtocolError(f"bad server address {spec!r}, expected HOST:PORT")
    return host, int(port)


def cmd_fixture(args) -> int:
    if args.corpus:
        out = fixture_mod.generate_corpus(args.out, seed=args.seed,
                                          n_train=args.train, n_test=args.test)
        print(f"wrote {len(out['train'])} train + {len(out['test'])} test sequences "
              f"under {args.out}")
        return 0
    perm = None
    if args.permute_colors:
        perm = [(i + 1) % args.subjects for i in range(args.subjects)]
    dirs = fixture_mod.generate_fixture(
        args.out, seed=args.seed, n_subjects=args.subjects,
        frames_per_subject=args.frames, frame_offset=args.frame_offset,
        color_permutation=perm)
    print(f"wrote {len(dirs)} sequences under {args.out}")
    return 0


def cmd_train_pca(args) -> int:
    config = _config_from_args(args)
    root = Path(args.data)
    annotated = load_annotated_dir(root / "annotated")
    if not annotated:
        raise ReidError(f"no annotated images under {root / 'annotated'}")
    print(f"training skin/hair model on {len(annotated)} annotated images")
    skin_hair = train_skin_hair(
        annotated, lambda img: _base_features_for(img, config), seed=args.seed)
    seq_dirs = sorted(d for d in root.iterdir()
                      if d.is_dir() and (d / "calib.json").exists())
    sequences = [load_sequence(d) for d in seq_dirs]
    pooled = []
    for frames in sequences:
        for frame in frames:
            if gate_frame(frame):
                pooled.append(frame_appearance_vector(frame, skin_hair, config))
    if len(pooled) < 2:
        raise ReidError("need at least two gated frames to train the PCA")
    stats = collect_training_stats(sequences)
    k = args.k if args.k else min(config.pca_dim, len(pooled) - 1, len(pooled[0]))
    print(f"fitting PCA: {len(pooled)} vectors of dim {len(pooled[0])} -> {k}")
    pca = train_pca(np.stack(pooled), k, skeleton_stats=stats)
    out = _models_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    skin_hair.save(out / "skinhair.ridm")
    pca.save(out / "pca.ridp")
    print(f"wrote {out / 'skinhair.ridm'} and {out / 'pca.ridp'}")
    return 0


def cmd_train_global(args) -> int:
    config = _config_from_args(args)
    root = Path(args.data)
    annotated = load_annotated_dir(root / "annotated")
    if not annotated:
        raise ReidError(f"no annotated images under {root / 'annotated'}")
    feats = [_base_features_for(img, config) for img in annotated]
    print(f"training parse model on {len(annotated)} annotated images")
    model = train_global(annotated, feats, seed=args.seed)
    vocab_bow = train_bow(feats, words=config.bow_words, seed=args.seed)
    out = _models_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    model.save(out / "global.ridl")
    vocab_bow.save(out / "bow.ridw")
    trained = int(model.trained.sum())
    print(f"wrote {out / 'global.ridl'} ({trained} labels with data) "
          f"and {out / 'bow.ridw'}")
    return 0


def _sequence_descriptor(args, config: Config) -> np.ndarray:
    frames = load_sequence(args.data)
    return sequence_identity_descriptor(frames, _load_skinhair(args),
                                        _load_pca(args), config)


def cmd_extract(args) -> int:
    config = _config_from_args(args)
    desc = _sequence_descriptor(args, config)
    if args.out:
        np.save(args.out, desc)
        print(f"wrote {args.out}")
    else:
        print(json.dumps([round(float(v), 9) for v in desc]))
    return 0


def cmd_enroll(args) -> int:
    config = _config_from_args(args)
    if args.fashion:
        return _enroll_fashion(args, config)
    desc = _sequence_descriptor(args, config)
    subject_id = args.subject_id
    name = args.name or Path(args.data).name
    if args.server:
        host, port = _split_host_port(args.server)
        rc.enroll(host, port, subject_id, name, desc)
        print(f"enrolled subject {subject_id} ({name}) via {args.server}")
        return 0
    gallery_path = Path(args.gallery)
    entries = load_gallery(gallery_path) if gallery_path.exists() else []
    entries.append(GalleryEntry(subject_id, name, desc))
    save_gallery(entries, gallery_path)
    print(f"enrolled subject {subject_id} ({name}), gallery now {len(entries)} entries")
    return 0


def _enroll_fashion(args, config: Config) -> int:
    skin_hair = _load_skinhair(args)
    pca = _load_pca(args)
    d = _models_dir(args)
    model = GlobalParseModel.load(d / "global.ridl")
    vocab_bow = BowVocabulary.load(d / "bow.ridw")
    annotated = load_annotated_dir(args.data)
    if not annotated:
        raise ReidError(f"no annotated images under {args.data}")
    entries = []
    spmaps = {}
    for i, img in enumerate(annotated):
        desc = compress(pca, annotated_appearance_vector(img, skin_hair, config))
        entry, spmap = build_fashion_entry(
            img, i, desc, _base_features_for(img, config), vocab_bow, model, config)
        entries.append(entry)
        spmaps[entry.image_id] = spmap
    save_fashion_gallery(args.fashion_dir, entries, spmaps)
    print(f"enrolled {len(entries)} fashion images into {args.fashion_dir}")
    return 0


def cmd_identify(args) -> int:
    config = _config_from_args(args)
    desc = _sequence_descriptor(args, config)
    if args.server:
        host, port = _split_host_port(args.server)
        results = rc.identify(host, port, desc, args.k)
    else:
        gallery = Gallery.from_entries(load_gallery(args.gallery))
        results = gallery_identify(gallery, desc, args.k)
    for rank, (sid, name, dist) in enumerate(results, start=1):
        print(f"{rank}\t{sid}\t{name}\t{dist:.6f}")
    return 0


def cmd_parse(args) -> int:
    config = _config_from_args(args)
    models = _load_parse_models(args)
    pca = _load_pca(args)
    frames = load_sequence(args.data)
    frame = next((f for f in frames if f.frame_index == args.frame), None)
    if frame is None:
        raise ReidError(f"no frame {args.frame} in {args.data}")
    if not gate_frame(frame):
        raise ReidError(f"frame {args.frame} does not pass the tracking gate")
    desc = compress(pca, frame_appearance_vector(frame, models.skin_hair, config))
    skel2d = project(frame.skeleton, frame.calibration)
    pose2d = np.array([[j.u, j.v] for j in skel2d.joints])
    result, colors = parse_query(frame.rgb, pose2d, frame.person_mask, desc,
                                 models, config)
    for name in sorted(result.item_masks):
        color = colors.get(name)
        suffix = f"\t{color}" if color else ""
        print(f"{name}\t{int(result.item_masks[name].sum())}px{suffix}")
    if args.out:
        write_png(Path(args.out), result.label_map.astype(np.uint16))
        print(f"wrote {args.out}")
    return 0


def cmd_optimize_weights(args) -> int:
    from reidkit.parsing.combine import candidate_labels
    from reidkit.parsing.weights import ParseInstance, optimize_weights
    from reidkit.parsing import segmentation
    from reidkit.parsing.bow import bow_histograms
    from reidkit.parsing.global_model import global_parse
    from reidkit.parsing.transfer import transfer_parse
    from reidkit.retrieval.gallery import vote_tags
    from reidkit.data.vocab import null_id

    config = _config_from_args(args)
    models = _load_parse_models(args)
    pca = _load_pca(args)
    annotated = load_annotated_dir(Path(args.data) / "annotated")
    if not annotated:
        raise ReidError(f"no annotated images under {Path(args.data) / 'annotated'}")
    vocab = load_vocabulary()
    instances = []
    for img in annotated:
        desc = compress(pca, annotated_appearance_vector(img, models.skin_hair, config))
        ids, _ = models.fashion.index.knn(
            desc, min(config.fashion_k, models.fashion.index.size))
        neighbors = [models.fashion.entries[i] for i in ids]
        tau = vote_tags([e.tags for e in neighbors], config.vote_min)
        base = _base_features_for(img, config)
        s_global = global_parse(models.global_model, base, tau)
        sp_labels = segmentation.oversegment(img.rgb, config.felz_k, config.felz_sigma,
                                             config.felz_min_size)
        sps = segmentation.superpixel_stats(sp_labels, img.pose2d)
        bows = bow_histograms(base, sp_labels, models.bow)
        centroids = np.stack([sp.centroid_norm for sp in sps])
        s_transfer = transfer_parse(sp_labels, centroids, bows, neighbors, tau,
                                    config.match_radius)
        ids_in_tau = candidate_labels(tau)
        names = [vocab[i] for i in ids_in_tau]
        fg = img.foreground(null_id())
        instances.append(ParseInstance(
            global_stack=np.stack([s_global[n] for n in names]),
            transfer_stack=np.stack([s_transfer[n] for n in names]),
            label_ids=ids_in_tau,
            truth=img.labels,
            foreground=fg,
            person_mask=fg,
        ))
    weights, accuracy = optimize_weights(instances)
    payload = {"lambda1": weights.lambda1, "lambda2": weights.lambda2,
               "foreground_accuracy": accuracy}
    print(json.dumps(payload, sort_keys=True))
    if args.out:
        Path(args.out).write_text(json.dumps(payload, sort_keys=True) + "\n")
    return 0


def cmd_evaluate(args) -> int:
    config = _config_from_args(args)
    if args.what == "cmc":
        gallery = Gallery.from_entries(load_gallery(args.gallery))
        name_to_id = {e.name: e.subject_id for e in gallery.entries}
        skin_hair = _load_skinhair(args)
        pca = _load_pca(args)
        rankings = []
        truth = []
        probes = 0
        for seq_dir in sorted(Path(args.data).iterdir()):
            if not (seq_dir / "calib.json").exists():
                continue
            if seq_dir.name not in name_to_id:
                continue
            frames = load_sequence(seq_dir)
            for frame in frames:
                if not gate_frame(frame):
                    continue
                desc = frame_identity_descriptor(frame, skin_hair, pca, config)
                ranked = [sid for sid, _, _ in rank_subjects(gallery, desc)]
                rankings.append(ranked)
                truth.append(name_to_id[seq_dir.name])
                probes += 1
        curve = metrics.cmc_curve(rankings, truth)
        for rank, value in enumerate(curve, start=1):
            print(f"rank-{rank}\t{value:.4f}")
        print(f"probes\t{probes}")
        return 0

    # tag precision/recall over annotated images
    models = _load_parse_models(args)
    pca = _load_pca(args)
    annotated = load_annotated_dir(Path(args.data) / "annotated")
    scores = []
    for img in annotated:
        desc = compress(pca, annotated_appearance_vector(img, models.skin_hair, config))
        tau = retrieve_tags(models.fashion.index, models.fashion.tag_sets(), desc,
                            k=min(config.fashion_k, models.fashion.index.size),
                            vote_min=config.vote_min)
        scores.append(metrics.evaluate_tags(tau, img.tags))
    if not scores:
        raise ReidError("no annotated images to evaluate")
    p = sum(s[0] for s in scores) / len(scores)
    r = sum(s[1] for s in scores) / len(scores)
    f = sum(s[2] for s in scores) / len(scores)
    print(f"precision\t{p:.4f}")
    print(f"recall\t{r:.4f}")
    print(f"f1\t{f:.4f}")
    return 0


def cmd_serve(args) -> int:
    from reidkit.service.server import serve

    config = _config_from_args(args)
    parse_models = None
    if args.models and args.fashion_dir:
        parse_models = _load_parse_models(args)
    server = serve(args.gallery, host=args.host, port=args.port,
                   parse_models=parse_models, config=config)
    host, port = server.server_address[:2]
    print(f"listening on {host}:{port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reidkit",
                                     description="soft-biometric person re-identification")
    parser.add_argument("--config", help="JSON file overriding default parameters")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for stochastic steps")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fixture", help="generate a synthetic corpus")
    p.add_argument("out")
    p.add_argument("--subjects", type=int, default=5)
    p.add_argument("--frames", type=int, default=4)
    p.add_argument("--frame-offset", type=int, default=0)
    p.add_argument("--permute-colors", action="store_true",
                   help="rotate clothing colors across subjects")
    p.add_argument("--corpus", action="store_true",
                   help="emit a train/test split corpus instead")
    p.add_argument("--train", type=int, default=50)
    p.add_argument("--test", type=int, default=56)
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("train-pca", help="train skin/hair + appearance PCA")
    p.add_argument("--data", required=True, help="fixture root with sequences + annotated/")
    p.add_argument("--models", required=True)
    p.add_argument("--k", type=int, default=0, help="PCA output dim (0 = auto)")
    p.set_defaults(func=cmd_train_pca)

    p = sub.add_parser("train-global", help="train parse model + BoW codebooks")
    p.add_argument("--data", required=True)
    p.add_argument("--models", required=True)
    p.set_defaults(func=cmd_train_global)

    p = sub.add_parser("extract", help="compute a sequence descriptor")
    p.add_argument("--data", required=True, help="sequence directory")
    p.add_argument("--models", required=True)
    p.add_argument("--out", help="write .npy instead of printing JSON")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("enroll", help="enroll a sequence (or fashion images)")
    p.add_argument("--data", required=True)
    p.add_argument("--models", required=True)
    p.add_argument("--gallery")
    p.add_argument("--subject-id", type=int, default=0)
    p.add_argument("--name")
    p.add_argument("--server", help="HOST:PORT to enroll remotely")
    p.add_argument("--fashion", action="store_true",
                   help="treat --data as annotated images for the fashion gallery")
    p.add_argument("--fashion-dir", help="fashion gallery directory (with --fashion)")
    p.set_defaults(func=cmd_enroll)

    p = sub.add_parser("identify", help="rank gallery subjects for a probe sequence")
    p.add_argument("--data", required=True)
    p.add_argument("--models", required=True)
    p.add_argument("--gallery")
    p.add_argument("--server")
    p.add_argument("--k", type=int, default=5)
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("parse", help="parse clothing in one frame")
    p.add_argument("--data", required=True)
    p.add_argument("--models", required=True)
    p.add_argument("--fashion-dir", required=True)
    p.add_argument("--frame", type=int, default=0)
    p.add_argument("--out", help="write the label map as 16-bit PNG")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("optimize-weights", help="fit the likelihood exponents")
    p.add_argument("--data", required=True)
    p.add_argument("--models", required=True)
    p.add_argument("--fashion-dir", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_optimize_weights)

    p = sub.add_parser("evaluate", help="CMC or tag precision/recall")
    p.add_argument("what", choices=["cmc", "tags"])
    p.add_argument("--data", required=True)
    p.add_argument("--models", required=True)
    p.add_argument("--gallery")
    p.add_argument("--fashion-dir")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("serve", help="run the gallery server")
    p.add_argument("--gallery", required=True)
    p.add_argument("--models")
    p.add_argument("--fashion-dir")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=7643)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except (ProtocolError, rc.ServerError, ConnectionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ReidError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
