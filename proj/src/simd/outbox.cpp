#include "anafi/simd/outbox.hpp"

#include <algorithm>

namespace anafi::simd {

FramePtr make_frame(protocol::Envelope e) {
    auto f = std::make_shared<Frame>();
    f->wire = protocol::encode(e);
    f->envelope = std::move(e);
    return f;
}

void Outbox::push_topic(const std::string& topic, FramePtr frame, std::chrono::milliseconds wait) {
    {
        std::unique_lock lock(mutex_);
        if (closed_) return;
        auto full = [&] { return counts_[topic] >= depth_; };
        if (full() && wait.count() > 0 && !stalled_) {
            if (!writable_.wait_for(lock, wait, [&] { return closed_ || !full(); })) stalled_ = true;
            if (closed_) return;
        }
        if (full()) {
            const auto it = std::find_if(items_.begin(), items_.end(), [&](const Item& i) { return i.topic == topic; });
            items_.erase(it);
            --counts_[topic];
            ++dropped_;
        }
        items_.push_back({topic, std::move(frame)});
        ++counts_[topic];
    }
    readable_.notify_one();
    if (wakeup_) wakeup_();
}

void Outbox::push(FramePtr frame) {
    {
        std::lock_guard lock(mutex_);
        if (closed_) return;
        items_.push_back({std::string(), std::move(frame)});
    }
    readable_.notify_one();
    if (wakeup_) wakeup_();
}

std::optional<FramePtr> Outbox::take_locked() {
    if (items_.empty()) return std::nullopt;
    Item item = std::move(items_.front());
    items_.pop_front();
    if (!item.topic.empty()) --counts_[item.topic];
    stalled_ = false;
    writable_.notify_all();
    return std::move(item.frame);
}

std::optional<FramePtr> Outbox::pop() {
    std::unique_lock lock(mutex_);
    readable_.wait(lock, [&] { return closed_ || !items_.empty(); });
    if (closed_) return std::nullopt;
    return take_locked();
}

std::optional<FramePtr> Outbox::try_pop() {
    std::lock_guard lock(mutex_);
    if (closed_) return std::nullopt;
    return take_locked();
}

void Outbox::purge(const std::string& topic) {
    std::lock_guard lock(mutex_);
    std::erase_if(items_, [&](const Item& i) { return i.topic == topic; });
    counts_.erase(topic);
    writable_.notify_all();
}

void Outbox::close() {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
        items_.clear();
        counts_.clear();
    }
    readable_.notify_all();
    writable_.notify_all();
    if (wakeup_) wakeup_();
}

bool Outbox::closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
}

std::size_t Outbox::size() const {
    std::lock_guard lock(mutex_);
    return items_.size();
}

std::size_t Outbox::queued(const std::string& topic) const {
    std::lock_guard lock(mutex_);
    const auto it = counts_.find(topic);
    return it == counts_.end() ? 0 : it->second;
}

std::uint64_t Outbox::dropped() const {
    std::lock_guard lock(mutex_);
    return dropped_;
}

}  // namespace anafi::simd
