#include <gtest/gtest.h>

#include <algorithm>
#include <csignal>
#include <fstream>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "aegis/credential_store.hpp"
#include "aegis/event_log.hpp"
#include "aegis/fs_util.hpp"
#include "aegis/object_store.hpp"
#include "test_support.hpp"

using namespace aegis;
using aegis::testing::TempDir;

namespace {

std::vector<std::uint8_t> bytes(const std::string& s) { return {s.begin(), s.end()}; }

AccessEvent event(const std::string& device, bool granted = false) {
  AccessEvent e;
  e.device_id = device;
  e.granted = granted;
  e.reason = granted ? Reason::granted : Reason::no_match;
  return e;
}

// Payload that carries its own key and length, so a torn or mixed-up file
// can be recognized without knowing which write landed last.
std::vector<std::uint8_t> self_describing(const std::string& key, int version) {
  const std::string head = key + ":" + std::to_string(version) + ":";
  std::string body(static_cast<std::size_t>(1000 + (version * 37) % 5000), static_cast<char>('a' + version % 26));
  return bytes(head + std::to_string(body.size()) + ":" + body);
}

bool well_formed(const std::string& key, const std::vector<std::uint8_t>& data) {
  const std::string s(data.begin(), data.end());
  const auto a = s.find(':');
  const auto b = s.find(':', a + 1);
  const auto c = s.find(':', b + 1);
  if (a == std::string::npos || b == std::string::npos || c == std::string::npos) return false;
  if (s.substr(0, a) != key) return false;
  const int version = std::stoi(s.substr(a + 1, b - a - 1));
  return data == self_describing(key, version);
}

}  // namespace

TEST(ObjectStore, PutGetOverwriteDelete) {
  TempDir dir;
  ObjectStore store(dir.path());
  const auto v = store.put("faces", "k1.pgm", bytes("hello"));
  EXPECT_EQ(v.size, 5u);
  EXPECT_EQ(v.etag, fnv1a_hex(bytes("hello")));
  EXPECT_EQ(*store.get("faces", "k1.pgm"), bytes("hello"));
  store.put("faces", "k1.pgm", bytes("second"));
  EXPECT_EQ(*store.get("faces", "k1.pgm"), bytes("second"));
  EXPECT_FALSE(store.get("faces", "missing").has_value());
  store.remove("faces", "k1.pgm");
  store.remove("faces", "k1.pgm");
  EXPECT_FALSE(store.get("faces", "k1.pgm").has_value());
}

TEST(ObjectStore, NameValidation) {
  TempDir dir;
  ObjectStore store(dir.path());
  EXPECT_THROW(store.put("faces", "UPPER", bytes("x")), StorageError);
  EXPECT_THROW(store.put("faces", "../escape", bytes("x")), StorageError);
  EXPECT_THROW(store.put("faces", "..", bytes("x")), StorageError);
  EXPECT_THROW(store.put("", "k", bytes("x")), StorageError);
  EXPECT_THROW(store.put("faces", std::string(65, 'a'), bytes("x")), StorageError);
  EXPECT_TRUE(ObjectStore::valid_name("abc-1_2.pgm"));
}

TEST(ObjectStore, ListingSortedAndPrefixed) {
  TempDir dir;
  ObjectStore store(dir.path());
  EXPECT_TRUE(store.list("nothing").empty());
  std::vector<std::string> keys{"b", "ab", "a", "c9", "c10"};
  std::mt19937_64 rng(1);
  for (int round = 0; round < 20; ++round) {
    std::shuffle(keys.begin(), keys.end(), rng);
    TempDir d;
    ObjectStore s(d.path());
    for (const auto& k : keys) s.put("bkt", k, bytes(k));
    EXPECT_EQ(s.list("bkt"), (std::vector<std::string>{"a", "ab", "b", "c10", "c9"}));
    EXPECT_EQ(s.list("bkt", "a"), (std::vector<std::string>{"a", "ab"}));
  }
}

TEST(ObjectStore, ConcurrentWritersNeverTear) {
  TempDir dir;
  ObjectStore store(dir.path());
  std::atomic<bool> stop{false};
  std::atomic<int> bad{0};
  std::thread reader([&] {
    while (!stop) {
      if (const auto got = store.get("b", "hot"); got && !well_formed("hot", *got)) ++bad;
    }
  });
  std::vector<std::thread> writers;
  for (int w = 0; w < 3; ++w) {
    writers.emplace_back([&, w] {
      for (int i = 0; i < 60; ++i) store.put("b", "hot", self_describing("hot", w * 1000 + i));
    });
  }
  for (auto& t : writers) t.join();
  stop = true;
  reader.join();
  EXPECT_EQ(bad.load(), 0);
  EXPECT_EQ(store.list("b"), std::vector<std::string>{"hot"});
}

TEST(CredentialStore, UpsertGetDeleteList) {
  TempDir dir;
  CredentialStore store(dir.path());
  UserRecord u{"user-1", "Ada", AccessLevel::admin, true};
  store.put(u);
  EXPECT_EQ(*store.get_user("user-1"), u);
  u.display_name = "Ada L";
  store.put(u);
  EXPECT_EQ(store.get_user("user-1")->display_name, "Ada L");
  store.delete_user("nope");
  for (const char* id : {"c", "a", "b"}) store.put(FaceRecord{id, "user-1", std::string("faces/") + id, {}, ""});
  const auto faces = store.list_faces();
  ASSERT_EQ(faces.size(), 3u);
  EXPECT_EQ(faces[0].face_id, "a");
  EXPECT_EQ(faces[2].face_id, "c");
  store.delete_face("b");
  EXPECT_FALSE(store.get_face("b").has_value());

  CredentialStore reopened(dir.path());
  EXPECT_EQ(reopened.list_faces().size(), 2u);
  EXPECT_EQ(*reopened.get_user("user-1"), u);
}

TEST(CredentialStore, SchemaAgnosticTable) {
  TempDir dir;
  JsonTable t(dir / "t.json");
  t.put("x", nlohmann::json{{"anything", {1, 2, 3}}});
  EXPECT_EQ(t.get("x")->at("anything").size(), 3u);
  EXPECT_EQ(t.size(), 1u);
}

TEST(EventLog, AppendListRestart) {
  TempDir dir;
  {
    EventLog log(dir.path());
    const auto a = log.append(event("d1"));
    const auto b = log.append(event("d2", true));
    EXPECT_EQ(b.event_id, a.event_id + 1);
    EXPECT_FALSE(a.timestamp.empty());
    const auto first = log.list(0, 1);
    ASSERT_EQ(first.size(), 1u);
    EXPECT_EQ(first[0], a);
    EXPECT_EQ(log.list(a.event_id, 100), std::vector<AccessEvent>{b});
  }
  EventLog reopened(dir.path());
  const auto all = reopened.list(0, 100);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[1].device_id, "d2");
  EXPECT_EQ(reopened.append(event("d3")).event_id, 3u);
}

TEST(EventLog, TornTailIsDropped) {
  TempDir dir;
  {
    EventLog log(dir.path());
    for (int i = 0; i < 5; ++i) log.append(event("d"));
  }
  {
    std::ofstream out(dir / "events.log", std::ios::app | std::ios::binary);
    out << R"({"event_id":6,"timestamp":"2026-01-01T00:00:00.000Z","dev)";
  }
  EventLog log(dir.path());
  EXPECT_EQ(log.last_id(), 5u);
  EXPECT_EQ(log.append(event("after")).event_id, 6u);
  EventLog again(dir.path());
  EXPECT_EQ(again.list(0, 100).size(), 6u);
  EXPECT_EQ(again.list(5, 1)[0].device_id, "after");
}

TEST(EventLog, CorruptMiddleLineIsAnError) {
  TempDir dir;
  {
    EventLog log(dir.path());
    log.append(event("d"));
  }
  {
    std::ofstream out(dir / "events.log", std::ios::app | std::ios::binary);
    out << "not json\n";
  }
  EXPECT_THROW(EventLog log(dir.path()), StorageError);
}

TEST(FsUtil, AtomicWriteAndProbe) {
  TempDir dir;
  atomic_write_file(dir / "a" / "b.txt", std::string("one"));
  atomic_write_file(dir / "a" / "b.txt", std::string("two"));
  const auto got = read_file(dir / "a" / "b.txt");
  ASSERT_TRUE(got);
  EXPECT_EQ(std::string(got->begin(), got->end()), "two");
  EXPECT_FALSE(read_file(dir / "none").has_value());
  EXPECT_NO_THROW(ensure_writable_dir(dir / "fresh"));
  if (::geteuid() != 0) {
    std::filesystem::permissions(dir / "fresh", std::filesystem::perms::owner_read | std::filesystem::perms::owner_exec);
    EXPECT_THROW(ensure_writable_dir(dir / "fresh"), StorageError);
  }
  EXPECT_THROW(ensure_writable_dir("/proc/aegis-cannot-exist"), StorageError);
}

TEST(Durability, KillDuringWritesLeavesConsistentState) {
  TempDir dir;
  for (int round = 0; round < 3; ++round) {
    const pid_t pid = ::fork();
    ASSERT_GE(pid, 0);
    if (pid == 0) {
      ObjectStore objects(dir.path());
      CredentialStore creds(dir.path());
      EventLog log(dir.path());
      for (int i = 0;; ++i) {
        const std::string key = "k" + std::to_string(i % 7);
        objects.put("b", key, self_describing(key, i));
        creds.put(UserRecord{"u" + std::to_string(i % 5), "name-" + std::to_string(i), AccessLevel::standard, true});
        log.append(event("dev-" + std::to_string(i)));
      }
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(150 + 70 * round));
    ::kill(pid, SIGKILL);
    int status = 0;
    ::waitpid(pid, &status, 0);
    ASSERT_TRUE(WIFSIGNALED(status));

    ObjectStore objects(dir.path());
    for (const auto& key : objects.list("b")) {
      const auto data = objects.get("b", key);
      ASSERT_TRUE(data);
      ASSERT_TRUE(well_formed(key, *data)) << key;
    }
    CredentialStore creds(dir.path());
    for (const auto& u : creds.list_users()) ASSERT_EQ(u.display_name.rfind("name-", 0), 0u);
    EventLog log(dir.path());
    const auto events = log.list(0, 1000000);
    ASSERT_FALSE(events.empty());
    for (std::size_t i = 0; i < events.size(); ++i) ASSERT_EQ(events[i].event_id, i + 1);
  }
}
